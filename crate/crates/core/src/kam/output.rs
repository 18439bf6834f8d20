use super::analytic::AnalyticReport;
use super::config::KamConfig;
use super::engine::{RunLog, StepReport};
use crate::complex::{diophantine_scan, Fit, Flavor};
use crate::error::{Error, Result};
use crate::geometry::{conjugate_perturbation, CompositionGrid};
use crate::models::{parse_model, Model};
use crate::spectral::{
    cochain_from_json, cochain_sup_norm, spectrum_from_json, spectrum_to_json, sq_bound, Cochain, Freq,
    VectorFieldSpectrum, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

pub const STEPS_COLUMNS: [&str; 11] = [
    "m",
    "eps_m",
    "N_m",
    "sup_before",
    "sup_after",
    "sobolev2",
    "tail",
    "obstruction",
    "solver_residual",
    "hardy_r_m",
    "wall_ms",
];

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Random smooth witness: uniform coefficients on 0 < |k| <= max_freq, scaled to the amplitude.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomWitness {
    pub amplitude: f64,
    #[serde(default = "default_witness_freq")]
    pub max_freq: f64,
}

fn default_witness_freq() -> f64 {
    3.0
}

/// Run description as read from a JSON file. Everything that is not a model or
/// perturbation field is a `KamConfig` field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSpec {
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub presentation: Option<Model>,
    /// Perturbation cochain: one spectrum JSON per generator.
    #[serde(default)]
    pub p0: Option<serde_json::Value>,
    /// Displacement y; the perturbation is the isometric action conjugated by Exp{y}.
    #[serde(default)]
    pub witness: Option<serde_json::Value>,
    #[serde(default)]
    pub random_witness: Option<RandomWitness>,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub config: KamConfig,
    #[serde(skip)]
    supplied: Supplied,
}

#[derive(Clone, Copy, Debug, Default)]
struct Supplied {
    sigma_tau: bool,
    eps0: bool,
    n: bool,
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let has = |k: &str| v.get(k).is_some_and(|x| !x.is_null());
        if has("sigma") != has("tau") {
            return Err(Error::InvalidInput("sigma and tau must be given together".into()));
        }
        let supplied = Supplied {
            sigma_tau: has("sigma"),
            eps0: has("eps0"),
            n: has("n"),
        };
        let mut spec: RunSpec = serde_json::from_value(v)?;
        spec.supplied = supplied;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// A run ready to start: validated model, resolved config and initial perturbation.
#[derive(Clone, Debug)]
pub struct PreparedRun {
    pub model: Model,
    pub config: KamConfig,
    pub p0: Cochain,
    pub witness: Option<VectorFieldSpectrum>,
    /// Fit used when sigma and tau were not supplied.
    pub fit: Option<Fit>,
}

fn random_witness(dim: usize, rw: &RandomWitness, seed: u64) -> Result<VectorFieldSpectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut half = BTreeMap::new();
    let ks: Vec<Freq> = crate::spectral::lattice_ball(dim, sq_bound(rw.max_freq))
        .into_values()
        .flatten()
        .filter(|k| !k.is_zero() && k.is_canonical())
        .collect();
    if ks.is_empty() {
        return Err(Error::InvalidInput("random witness needs max_freq >= 1".into()));
    }
    let scale = rw.amplitude / (2.0 * ks.len() as f64 * (dim as f64).sqrt());
    for k in ks {
        let c = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
            .collect();
        half.insert(k, c);
    }
    VectorFieldSpectrum::from_half(dim, half)
}

/// Resolve the model, build P0 and fill in sigma, tau (from a d0 scan), n and eps0 when absent.
pub fn prepare(spec: &RunSpec) -> Result<PreparedRun> {
    let model = match (&spec.model, &spec.presentation) {
        (Some(name), None) => parse_model(name)?,
        (None, Some(m)) => Model::new(m.name.clone(), m.presentation.clone(), m.action.clone())?,
        _ => return Err(Error::InvalidInput("give exactly one of model and presentation".into())),
    };
    let action = &model.action;
    if !action.is_torus() {
        return Err(Error::UnsupportedAction("KAM runs need a torus action".into()));
    }
    let dim = action.dim();
    let mut cfg = spec.config.clone();
    if !spec.supplied.n {
        cfg.n = action.manifold_dim();
    }
    let cg = CompositionGrid::new(dim, cfg.grid, cfg.max_freq)?;
    let given = [spec.p0.is_some(), spec.witness.is_some(), spec.random_witness.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::InvalidInput("give exactly one of p0, witness and random_witness".into()));
    }
    let (p0, witness) = if let Some(v) = &spec.p0 {
        let p = cochain_from_json(v)?;
        if p.len() != action.generators() || p.entries.iter().any(|e| e.dim() != dim) {
            return Err(Error::InvalidInput("p0 does not match the action's generators and dimension".into()));
        }
        (p, None)
    } else {
        let y = match (&spec.witness, &spec.random_witness) {
            (Some(v), _) => spectrum_from_json(v)?,
            (_, Some(rw)) => random_witness(dim, rw, spec.seed)?,
            _ => unreachable!(),
        };
        if y.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: y.dim(),
            });
        }
        let zero = Cochain::zero(action.generators(), dim);
        (conjugate_perturbation(action, &zero, &y, &cg)?, Some(y))
    };
    let mut fit = None;
    if !spec.supplied.sigma_tau {
        let report = diophantine_scan(action, &model.presentation, Flavor::D0, sq_bound(cfg.max_freq).max(1))?;
        let f = report
            .fit
            .ok_or_else(|| Error::InvalidInput("no Diophantine fit available; supply sigma and tau".into()))?;
        cfg.sigma = f.sigma;
        cfg.tau = f.tau;
        fit = Some(f);
    }
    if !spec.supplied.eps0 {
        let s = cochain_sup_norm(&p0, cg.grid)?;
        cfg.eps0 = if s > 0.0 && s < 1.0 { s } else { 1e-3 };
    }
    cfg.validate()?;
    Ok(PreparedRun {
        model,
        config: cfg,
        p0,
        witness,
        fit,
    })
}

pub fn write_steps_csv(path: &Path, steps: &[StepReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(STEPS_COLUMNS)?;
    for s in steps {
        let mut row = vec![s.m.to_string()];
        row.extend(
            [
                s.eps_m,
                s.n_m,
                s.sup_before,
                s.sup_after,
                s.sobolev2,
                s.tail,
                s.obstruction,
                s.solver_residual,
                s.hardy_r_m,
                s.wall_ms,
            ]
            .map(fmt17),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinalReport {
    pub converged: bool,
    pub residual: f64,
    pub verify_residual: Option<f64>,
    #[serde(rename = "W")]
    pub w: serde_json::Value,
    pub theoretical_r_hat: f64,
    pub theoretical_r_star: f64,
    pub config: KamConfig,
    pub steps: serde_json::Value,
    pub analytic: Option<serde_json::Value>,
    pub error: Option<String>,
}

impl FinalReport {
    pub fn new(log: &RunLog, analytic: Option<&AnalyticReport>, error: Option<&Error>) -> Result<Self> {
        Ok(FinalReport {
            converged: log.converged && error.is_none(),
            residual: log.final_residual,
            verify_residual: log.verify_residual,
            w: spectrum_to_json(&log.state.w),
            theoretical_r_hat: log.config.theoretical_r_hat(),
            theoretical_r_star: log.config.theoretical_r_star(),
            config: log.config.clone(),
            steps: serde_json::to_value(&log.steps)?,
            analytic: analytic.map(serde_json::to_value).transpose()?,
            error: error.map(|e| e.to_string()),
        })
    }
}

pub fn write_final_json(path: &Path, report: &FinalReport) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}
