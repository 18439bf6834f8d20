use super::config::Mode;
use super::engine::RunLog;
use crate::error::{Error, Result};
use crate::spectral::{cochain_weighted_norm, weighted_norm, Cochain};
use serde::Serialize;

/// Weighted norm of P at step K_m = 8m and radius r_m.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticSample {
    pub k_m: usize,
    pub m: usize,
    pub r_m: f64,
    pub eps_m: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyticReport {
    pub samples: Vec<AnalyticSample>,
    pub safety: f64,
    /// Every sample satisfies norm <= safety * eps_m.
    pub all_within: bool,
    /// ||W||_{r0/2} of the final conjugacy.
    pub w_half_radius: f64,
}

/// Outer-shell weight that signals the spectrum has outgrown the band: the part with
/// |k| > 3/4 max_freq, returned when it is both above 1e-8 and above 1e-3 of the total.
pub fn band_excess(p: &Cochain, r: f64, max_freq: f64, n: usize) -> Option<f64> {
    let cut = 0.75 * max_freq;
    let shell = cochain_weighted_norm(&p.map(|e| e.tail(cut)), r, n);
    let total = cochain_weighted_norm(p, r, n);
    (shell > 1e-8 && shell > 1e-3 * total).then_some(shell)
}

/// Collect the K_m = 8m samples of an analytic run and check them against eps_m.
pub fn analytic_track(log: &RunLog) -> Result<AnalyticReport> {
    let cfg = &log.config;
    if cfg.mode != Mode::Analytic {
        return Err(Error::InvalidInput("analytic tracking needs an analytic-mode run".into()));
    }
    let safety = cfg.analytic_safety;
    Ok(AnalyticReport {
        all_within: log.analytic_samples.iter().all(|s| s.norm <= safety * s.eps_m),
        samples: log.analytic_samples.clone(),
        safety,
        w_half_radius: weighted_norm(&log.state.w, cfg.r0 / 2.0, cfg.n),
    })
}
