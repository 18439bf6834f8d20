use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::spectral::{lattice_ball, lattice_shell, Freq, C64};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

/// Angle in units of a full turn (2 pi). Rationals stay exact so resonance tests are integer tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Rational { num: i64, den: i64 },
    Real(f64),
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Angle {
    pub fn rational(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num as i128, den as i128).max(1) as i64;
        let s = if den < 0 { -1 } else { 1 };
        Angle::Rational {
            num: s * num / g,
            den: s * den / g,
        }
    }

    /// Golden mean rotation (sqrt5 - 1)/2 turns.
    pub fn golden() -> Self {
        Angle::Real((5f64.sqrt() - 1.0) / 2.0)
    }

    pub fn turns(&self) -> f64 {
        match *self {
            Angle::Rational { num, den } => num as f64 / den as f64,
            Angle::Real(x) => x,
        }
    }

    pub fn radians(&self) -> f64 {
        TAU * self.turns()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Rational { num, den } => write!(f, "{num}/{den}"),
            Angle::Real(x) => write!(f, "{x:.17e}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// "p/q" (exact), "golden" ((sqrt5 - 1)/2), or a decimal number of turns.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "golden" {
            return Ok(Angle::golden());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| Error::InvalidInput(format!("bad angle {s}")))?;
            let q: i64 = q.trim().parse().map_err(|_| Error::InvalidInput(format!("bad angle {s}")))?;
            if q == 0 {
                return Err(Error::InvalidInput(format!("bad angle {s}")));
            }
            return Ok(Angle::rational(p, q));
        }
        s.parse::<f64>()
            .map(Angle::Real)
            .map_err(|_| Error::InvalidInput(format!("bad angle {s}")))
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Angle::Rational { num, den } => s.serialize_str(&format!("{num}/{den}")),
            Angle::Real(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Angle::Real(x)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Phase in turns reduced mod 1, exact when every input angle was rational.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    Exact { num: i128, den: i128 },
    Approx(f64),
}

impl Phase {
    fn zero() -> Self {
        Phase::Exact { num: 0, den: 1 }
    }

    fn add_scaled(self, m: i64, a: Angle) -> Phase {
        if m == 0 {
            return self;
        }
        match (self, a) {
            (Phase::Exact { num, den }, Angle::Rational { num: an, den: ad }) => {
                let (an, ad) = (an as i128 * m as i128, ad as i128);
                let n = num * ad + an * den;
                let d = den * ad;
                let g = gcd(n, d).max(1);
                let (n, d) = (n / g, d / g);
                Phase::Exact {
                    num: n.rem_euclid(d),
                    den: d,
                }
            }
            (p, a) => Phase::Approx((p.turns() + m as f64 * a.turns()).rem_euclid(1.0)),
        }
    }

    pub fn turns(&self) -> f64 {
        match *self {
            Phase::Exact { num, den } => num as f64 / den as f64,
            Phase::Approx(x) => x,
        }
    }

    /// True only for an exact integer phase.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Phase::Exact { num: 0, .. })
    }

    /// e^{2 pi i sign * phase}; exact on quarter turns, so exactly 1 on exact resonances.
    pub fn unit(&self, sign: f64) -> C64 {
        if let Phase::Exact { num, den } = *self {
            if (4 * num) % den == 0 {
                let q = (4 * num / den).rem_euclid(4);
                let s = if sign < 0.0 { -1.0 } else { 1.0 };
                return [
                    C64::new(1.0, 0.0),
                    C64::new(0.0, s),
                    C64::new(-1.0, 0.0),
                    C64::new(0.0, -s),
                ][q as usize];
            }
        }
        C64::from_polar(1.0, sign * TAU * self.turns())
    }
}

/// Isometric action realized by diagonal multipliers on a mode basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ActionKind {
    /// x -> x + alpha_l on T^d; alphas[l][axis] in turns. Multiplier e^{-i<k, alpha_l>}.
    TorusTranslation { dim: usize, alphas: Vec<Vec<Angle>> },
    /// Unitary phase per canonical torus frequency and generator, multiplier e^{2 pi i theta};
    /// unlisted frequencies are fixed.
    GenericDiagonal {
        dim: usize,
        generators: usize,
        phases: Vec<DiagonalPhase>,
    },
    /// z-axis rotations on the vector spherical harmonic bands J <= j_max. Multiplier e^{i m alpha_l}.
    SphereZRotation { j_max: u32, angles: Vec<Angle> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPhase {
    pub k: Vec<i32>,
    pub theta: Vec<Angle>,
}

/// Label of one basis mode inside a block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ModeLabel {
    Torus(Freq),
    Sphere { j: u32, l: u32, m: i32 },
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Torus(k) => write!(f, "k={:?}", k.as_slice()),
            ModeLabel::Sphere { j, l, m } => write!(f, "(J={j}, L={l}, m={m})"),
        }
    }
}

/// One mode of a block: its label, tangent component count and per-generator multipliers.
#[derive(Clone, Debug)]
pub struct ModeSite {
    pub label: ModeLabel,
    pub comps: usize,
    pub mult: SmallVec<[C64; 4]>,
    /// Per-generator flag: multiplier is exactly 1 by exact arithmetic.
    pub fixed: SmallVec<[bool; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierAction {
    #[serde(flatten)]
    pub kind: ActionKind,
}

impl MultiplierAction {
    pub fn torus_translation(alphas: Vec<Vec<Angle>>) -> Result<Self> {
        let dim = alphas.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || alphas.iter().any(|a| a.len() != dim) {
            return Err(Error::InvalidInput("translation vectors must share a positive dimension".into()));
        }
        Ok(MultiplierAction {
            kind: ActionKind::TorusTranslation { dim, alphas },
        })
    }

    pub fn sphere_z_rotation(j_max: u32, angles: Vec<Angle>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidInput("sphere action needs at least one angle".into()));
        }
        Ok(MultiplierAction {
            kind: ActionKind::SphereZRotation { j_max, angles },
        })
    }

    pub fn generic_diagonal(dim: usize, generators: usize, phases: Vec<DiagonalPhase>) -> Result<Self> {
        for p in &phases {
            if p.k.len() != dim || p.theta.len() != generators {
                return Err(Error::InvalidInput("diagonal phase entry has wrong shape".into()));
            }
            if !Freq::new(&p.k).is_canonical() {
                return Err(Error::InvalidInput(format!(
                    "diagonal phases are given on canonical frequencies only, got {:?}",
                    p.k
                )));
            }
        }
        Ok(MultiplierAction {
            kind: ActionKind::GenericDiagonal {
                dim,
                generators,
                phases,
            },
        })
    }

    pub fn generators(&self) -> usize {
        match &self.kind {
            ActionKind::TorusTranslation { alphas, .. } => alphas.len(),
            ActionKind::GenericDiagonal { generators, .. } => *generators,
            ActionKind::SphereZRotation { angles, .. } => angles.len(),
        }
    }

    /// Dimension of the torus the fields live on (1 for the sphere sector's scalar coefficients).
    pub fn dim(&self) -> usize {
        match &self.kind {
            ActionKind::TorusTranslation { dim, .. } | ActionKind::GenericDiagonal { dim, .. } => *dim,
            ActionKind::SphereZRotation { .. } => 1,
        }
    }

    /// Manifold dimension n.
    pub fn manifold_dim(&self) -> usize {
        match &self.kind {
            ActionKind::SphereZRotation { .. } => 2,
            _ => self.dim(),
        }
    }

    pub fn is_torus(&self) -> bool {
        !matches!(self.kind, ActionKind::SphereZRotation { .. })
    }

    /// Translation vectors in radians, when the action is a torus translation.
    pub fn translations(&self) -> Option<Vec<Vec<f64>>> {
        match &self.kind {
            ActionKind::TorusTranslation { alphas, .. } => Some(
                alphas
                    .iter()
                    .map(|a| a.iter().map(Angle::radians).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Phase (in turns) of generator `gen` (0-based) on torus frequency k, with the sign
    /// convention folded in so the multiplier is e^{2 pi i phase}.
    fn torus_phase(&self, gen: usize, k: &Freq) -> Result<Phase> {
        match &self.kind {
            ActionKind::TorusTranslation { alphas, .. } => {
                let mut p = Phase::zero();
                for (&ki, &a) in k.as_slice().iter().zip(&alphas[gen]) {
                    // multiplier e^{-i<k,alpha>}
                    p = p.add_scaled(-(ki as i64), a);
                }
                Ok(p)
            }
            ActionKind::GenericDiagonal { phases, .. } => {
                let (key, sign) = if k.is_canonical() { (k.clone(), 1) } else { (k.neg(), -1) };
                let hit = phases.iter().find(|p| p.k.as_slice() == key.as_slice());
                Ok(match hit {
                    Some(p) => Phase::zero().add_scaled(sign, p.theta[gen]),
                    None => Phase::zero(),
                })
            }
            ActionKind::SphereZRotation { .. } => Err(Error::UnsupportedAction(
                "sphere z-rotations act on band coefficients, not on torus fields".into(),
            )),
        }
    }

    /// Multiplier of pi(gamma_gen)_* on the torus mode k.
    pub fn multiplier(&self, gen: usize, k: &Freq) -> Result<C64> {
        Ok(self.torus_phase(gen, k)?.unit(1.0))
    }

    fn torus_site(&self, k: &Freq) -> ModeSite {
        let mut mult = SmallVec::new();
        let mut fixed = SmallVec::new();
        for g in 0..self.generators() {
            let p = self.torus_phase(g, k).expect("torus action");
            mult.push(p.unit(1.0));
            fixed.push(p.is_exact_zero());
        }
        ModeSite {
            label: ModeLabel::Torus(k.clone()),
            comps: self.dim(),
            mult,
            fixed,
        }
    }

    fn sphere_site(&self, j: u32, l: u32, m: i32) -> ModeSite {
        let ActionKind::SphereZRotation { angles, .. } = &self.kind else {
            unreachable!()
        };
        let mut mult = SmallVec::new();
        let mut fixed = SmallVec::new();
        for &a in angles {
            let p = Phase::zero().add_scaled(m as i64, a);
            mult.push(p.unit(1.0));
            fixed.push(p.is_exact_zero() || m == 0);
        }
        ModeSite {
            label: ModeLabel::Sphere { j, l, m },
            comps: 1,
            mult,
            fixed,
        }
    }

    /// Block keys (integer eigenvalue keys) up to `max_sq`, ascending.
    /// Torus: |k|^2. Sphere: J(J+1). In both cases lambda = sqrt(key).
    pub fn block_keys(&self, max_sq: u64) -> Vec<u64> {
        match &self.kind {
            ActionKind::SphereZRotation { j_max, .. } => (0..=*j_max as u64)
                .map(|j| j * (j + 1))
                .take_while(|&s| s <= max_sq)
                .collect(),
            _ => lattice_ball(self.dim(), max_sq).into_keys().collect(),
        }
    }

    /// All blocks with key <= max_sq, built in one lattice pass.
    pub fn blocks_up_to(&self, max_sq: u64) -> BTreeMap<u64, Vec<ModeSite>> {
        match &self.kind {
            ActionKind::SphereZRotation { .. } => self
                .block_keys(max_sq)
                .into_iter()
                .map(|s| (s, self.block_sites(s)))
                .collect(),
            _ => lattice_ball(self.dim(), max_sq)
                .into_iter()
                .map(|(s, ks)| (s, ks.iter().map(|k| self.torus_site(k)).collect()))
                .collect(),
        }
    }

    /// Mode sites of one block, in a fixed order.
    pub fn block_sites(&self, sq: u64) -> Vec<ModeSite> {
        match &self.kind {
            ActionKind::SphereZRotation { j_max, .. } => {
                let j = ((sq as f64).sqrt().floor()) as u64;
                if j * (j + 1) != sq || j > *j_max as u64 {
                    return Vec::new();
                }
                let j = j as u32;
                let ls: Vec<u32> = if j == 0 { vec![1] } else { vec![j - 1, j, j + 1] };
                let mut out = Vec::new();
                for l in ls {
                    for m in -(j as i32)..=(j as i32) {
                        out.push(self.sphere_site(j, l, m));
                    }
                }
                out
            }
            _ => lattice_shell(self.dim(), sq)
                .iter()
                .map(|k| self.torus_site(k))
                .collect(),
        }
    }

    /// Verify that every relation word acts trivially. Exact for rational angles,
    /// 1e-12 turns otherwise.
    pub fn check_relations(&self, pres: &GroupPresentation) -> Result<()> {
        if pres.generators != self.generators() {
            return Err(Error::InvalidInput(format!(
                "presentation has {} generators, action has {}",
                pres.generators,
                self.generators()
            )));
        }
        let close = |p: Phase| match p {
            Phase::Exact { num, .. } => num == 0,
            Phase::Approx(x) => x.min(1.0 - x) < 1e-12,
        };
        for (j, w) in pres.relations.iter().enumerate() {
            let ok = match &self.kind {
                ActionKind::TorusTranslation { dim, alphas } => (0..*dim).all(|axis| {
                    let mut p = Phase::zero();
                    for &l in w {
                        p = p.add_scaled(l.signum() as i64, alphas[l.unsigned_abs() as usize - 1][axis]);
                    }
                    close(p)
                }),
                ActionKind::SphereZRotation { angles, .. } => {
                    let mut p = Phase::zero();
                    for &l in w {
                        p = p.add_scaled(l.signum() as i64, angles[l.unsigned_abs() as usize - 1]);
                    }
                    close(p)
                }
                ActionKind::GenericDiagonal { phases, .. } => phases.iter().all(|ph| {
                    let mut p = Phase::zero();
                    for &l in w {
                        p = p.add_scaled(l.signum() as i64, ph.theta[l.unsigned_abs() as usize - 1]);
                    }
                    close(p)
                }),
            };
            if !ok {
                return Err(Error::InconsistentRelations(format!(
                    "relation {} ({:?}) does not act as the identity",
                    j + 1,
                    w
                )));
            }
        }
        Ok(())
    }
}
