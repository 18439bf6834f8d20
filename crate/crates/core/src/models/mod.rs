//! Worked examples: cyclic decompositions, periodic and abelian translations, sphere rotations,
//! plus the name and JSON loaders used by the CLI.

mod cyclic;
mod periodic;
mod sphere;

pub use cyclic::{check_order, cyclic_coefficients, cyclic_identity_check, CyclicCoefficients};
pub use periodic::{certify_periodic, periodic_translation_action, CertifiedFacts};
pub use sphere::sphere_z_action;

use crate::complex::{Angle, GroupPresentation, MultiplierAction};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A presentation together with an isometric action of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub presentation: GroupPresentation,
    pub action: MultiplierAction,
}

impl Model {
    pub fn new(name: impl Into<String>, presentation: GroupPresentation, action: MultiplierAction) -> Result<Self> {
        action.check_relations(&presentation)?;
        Ok(Model {
            name: name.into(),
            presentation,
            action,
        })
    }

    /// Parse `{generators, relations, action: {kind, ...}}` and validate it.
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Model = serde_json::from_str(text)?;
        let pres = GroupPresentation::new(m.presentation.generators, m.presentation.relations)?;
        Model::new(m.name, pres, m.action)
    }
}

/// Free abelian presentation on k generators (k(k-1)/2 commutators).
pub fn abelian_presentation(k: usize) -> Result<GroupPresentation> {
    if k == 0 {
        return Err(Error::InvalidInput("abelian presentation needs k >= 1".into()));
    }
    Ok(GroupPresentation::abelian(k))
}

/// First `count` primes.
fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().all(|p| !c.is_multiple_of(*p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// k commuting translations of T^d with entries frac(sqrt p) over consecutive primes.
pub fn abelian_translation(k: usize, d: usize) -> Result<Model> {
    if d == 0 {
        return Err(Error::InvalidInput("torus dimension must be positive".into()));
    }
    let ps = primes(k * d);
    let alphas = (0..k)
        .map(|g| (0..d).map(|a| Angle::Real((ps[g * d + a] as f64).sqrt().fract())).collect())
        .collect();
    Model::new(
        format!("abelian:{k}:{d}"),
        abelian_presentation(k)?,
        MultiplierAction::torus_translation(alphas)?,
    )
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad {what} '{x}'")))
        })
        .collect()
}

/// Model from a CLI name:
/// `cyclic:n`, `periodic:n1,n2,..`, `periodic-free:n1,..` (same translation, free presentation),
/// `abelian:k:d`, `sphere-z:Jmax:a1,a2,..`, `circle:ANGLE` (ANGLE is golden, p/q or turns).
pub fn parse_model(name: &str) -> Result<Model> {
    let (head, rest) = name.split_once(':').unwrap_or((name, ""));
    let bad = || Error::InvalidInput(format!("unrecognised model name '{name}'"));
    match head {
        "cyclic" => {
            let n: u64 = rest.parse().map_err(|_| bad())?;
            if n < 2 {
                return Err(bad());
            }
            Model::new(
                name,
                GroupPresentation::cyclic(n as usize),
                MultiplierAction::torus_translation(vec![vec![Angle::rational(1, n as i64)]])?,
            )
        }
        "periodic" | "periodic-free" => {
            let ns: Vec<u64> = parse_list(rest, "order")?;
            let action = periodic_translation_action(&ns)?;
            let pres = if head == "periodic" {
                GroupPresentation::cyclic(ns.iter().product::<u64>() as usize)
            } else {
                GroupPresentation::free(1)
            };
            Model::new(name, pres, action)
        }
        "abelian" => {
            let (k, d) = rest.split_once(':').ok_or_else(bad)?;
            let mut m = abelian_translation(k.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)?;
            m.name = name.to_string();
            Ok(m)
        }
        "sphere-z" => {
            let (j, angles) = rest.split_once(':').ok_or_else(bad)?;
            let j_max: u32 = j.parse().map_err(|_| bad())?;
            let angles: Vec<Angle> = parse_list(angles, "angle")?;
            let k = angles.len();
            Model::new(
                name,
                abelian_presentation(k)?,
                MultiplierAction::sphere_z_rotation(j_max, angles)?,
            )
        }
        "circle" => {
            let a: Angle = rest.parse()?;
            Model::new(name, GroupPresentation::free(1), MultiplierAction::torus_translation(vec![vec![a]])?)
        }
        _ => Err(bad()),
    }
}
