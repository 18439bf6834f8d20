use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Smooth,
    Analytic,
}

/// Which hypothesis licenses the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Hypothesis {
    /// Almost conjugate data; obstructions are monitored against the step threshold.
    #[default]
    #[serde(rename = "almost-conjugate", alias = "h1")]
    AlmostConjugate,
    /// Vanishing first cohomology, certified blockwise before the run.
    #[serde(rename = "vanishing-h1", alias = "h2")]
    VanishingH1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ObstructionPolicy {
    #[default]
    Abort,
    Warn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KamConfig {
    pub sigma: f64,
    pub tau: f64,
    /// Manifold dimension.
    pub n: usize,
    pub eps0: f64,
    pub mode: Mode,
    pub hypothesis: Hypothesis,
    pub r0: f64,
    pub max_steps: usize,
    pub min_steps: usize,
    pub target_residual: f64,
    /// Largest |k| kept in any spectrum.
    pub max_freq: f64,
    /// Composition grid points per axis (at least 4 max_freq).
    pub grid: usize,
    pub obstruction_policy: ObstructionPolicy,
    pub obstruction_safety: f64,
    /// Obstructions below this absolute level are treated as round-off.
    pub obstruction_floor: f64,
    /// Multiplier c with N_used = min(c N_m, max_freq).
    pub truncation_scale: f64,
    /// Factor applied to sigma/(1+N)^tau to get the smallest eigenvalue the solver accepts.
    pub min_eig_factor: f64,
    /// Relation defect allowed on the input perturbation.
    pub relation_tol: f64,
    /// Safety factor for the analytic decay check.
    pub analytic_safety: f64,
    /// Record wall-clock milliseconds (false writes 0 so outputs are reproducible byte for byte).
    pub wall_clock: bool,
}

impl Default for KamConfig {
    fn default() -> Self {
        KamConfig {
            sigma: 1.0,
            tau: 0.0,
            n: 1,
            eps0: 1e-3,
            mode: Mode::Smooth,
            hypothesis: Hypothesis::AlmostConjugate,
            r0: 0.5,
            max_steps: 15,
            min_steps: 1,
            target_residual: 1e-10,
            max_freq: 64.0,
            grid: 1024,
            obstruction_policy: ObstructionPolicy::Abort,
            obstruction_safety: 1.0,
            obstruction_floor: 1e-12,
            truncation_scale: 16.0,
            min_eig_factor: 1e-2,
            relation_tol: 1e-8,
            analytic_safety: 10.0,
            wall_clock: true,
        }
    }
}

impl KamConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.into()));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive");
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("tau must be nonnegative");
        }
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) {
            return bad("eps0 must lie in (0, 1)");
        }
        if self.mode == Mode::Analytic && !(self.r0 > 0.0 && self.r0.is_finite()) {
            return bad("r0 must be positive in analytic mode");
        }
        if self.n == 0 || self.max_steps == 0 {
            return bad("n and max_steps must be positive");
        }
        if !(self.target_residual > 0.0 && self.max_freq >= 1.0 && self.truncation_scale > 0.0) {
            return bad("target_residual, max_freq and truncation_scale must be positive");
        }
        Ok(())
    }

    /// tau + n + 1, the exponent base shared by the schedule and the regularity constants.
    pub fn exponent_base(&self) -> f64 {
        self.tau + self.n as f64 + 1.0
    }

    pub fn theoretical_r_hat(&self) -> f64 {
        20.0 * self.exponent_base()
    }

    pub fn theoretical_r_star(&self) -> f64 {
        60.0 * self.exponent_base()
    }

    /// Cutoff actually used at step m.
    pub fn truncation(&self, m: usize) -> f64 {
        (self.truncation_scale * schedule(self, m).1).min(self.max_freq)
    }

    /// Smallest accepted eigenvalue for a solve at cutoff N.
    pub fn min_eig_floor(&self, n_cut: f64) -> f64 {
        self.sigma / (1.0 + n_cut).powf(self.tau) * self.min_eig_factor
    }

    /// Analytic radius r_m = r0 (1/2 + 2^{-(m+1)}).
    pub fn radius(&self, m: usize) -> f64 {
        self.r0 * (0.5 + 0.5f64.powi(m as i32 + 1))
    }
}

/// (eps_m, N_m) with eps_m = eps0^{(5/4)^m} and N_m = eps_m^{-1/(8(tau+n+1))}, both through logs
/// so that large m underflows gracefully to eps_m = 0, N_m = inf.
pub fn schedule(cfg: &KamConfig, m: usize) -> (f64, f64) {
    let ln_eps = cfg.eps0.ln() * 1.25f64.powi(m as i32);
    let eps = ln_eps.exp();
    let n = (-ln_eps / (8.0 * cfg.exponent_base())).exp();
    (eps, n)
}
