use super::action::{ModeLabel, MultiplierAction};
use super::blocks::{kernel_threshold, mode_eigen, Which};
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    D0,
    Box,
    Relations,
    Dolgopyat,
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d0" => Ok(Flavor::D0),
            "box" => Ok(Flavor::Box),
            "relations" => Ok(Flavor::Relations),
            "dolgopyat" => Ok(Flavor::Dolgopyat),
            _ => Err(Error::InvalidInput(format!("unknown flavor {s}"))),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::D0 => "d0",
            Flavor::Box => "box",
            Flavor::Relations => "relations",
            Flavor::Dolgopyat => "dolgopyat",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockEntry {
    pub sq_norm: u64,
    pub lambda: f64,
    pub dim: usize,
    /// Smallest eigenvalue above the kernel threshold (for dolgopyat: smallest per-mode
    /// max_l |1 - phi_l| among non-resonant modes).
    pub min_nonzero: Option<f64>,
    pub kernel_dim: usize,
    /// Mode attaining `min_nonzero`, or for dolgopyat a resonant mode when one exists.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fit {
    /// Certified constant: min over blocks of minEig * (1 + lambda)^tau.
    pub sigma: f64,
    pub tau: f64,
    /// Intercept of the least-squares line, exp(ln sigma_fit).
    pub sigma_fit: f64,
    /// RMS residual of the log-log fit on the record-low envelope.
    pub residual: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub flavor: Flavor,
    pub max_sq_norm: u64,
    pub per_block: Vec<BlockEntry>,
    pub fit: Option<Fit>,
    /// Fit succeeded with residual < 0.5 and sigma > 0.
    pub diophantine: bool,
    /// Dolgopyat flavor only: a resonant mode with lambda > 0 was found.
    pub dolgopyat_failed: bool,
    /// Resonant mode with the largest lambda (dolgopyat flavor).
    pub resonant_witness: Option<String>,
    pub resonant_witness_lambda: Option<f64>,
}

impl DiophantineReport {
    /// Certified lower bound sigma / (1 + lambda)^tau.
    pub fn bound_at(&self, lambda: f64) -> Option<f64> {
        self.fit.as_ref().map(|f| f.sigma / (1.0 + lambda).powf(f.tau))
    }
}

/// Least-squares fit of ln(minEig) = ln(sigma) - tau ln(1 + lambda) on the running-minimum envelope.
pub fn fit_envelope(points: &[(f64, f64)]) -> Option<Fit> {
    let mut env: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::INFINITY;
    for &(lam, v) in points {
        if v <= 0.0 || !v.is_finite() {
            continue;
        }
        if v < best * (1.0 - 1e-12) {
            best = v;
            env.push(((1.0 + lam).ln(), v.ln()));
        }
    }
    if env.is_empty() {
        return None;
    }
    let (tau, ln_s, residual) = if env.len() < 2 {
        (0.0, env[0].1, 0.0)
    } else {
        let n = env.len() as f64;
        let mx = env.iter().map(|p| p.0).sum::<f64>() / n;
        let my = env.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = env.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = env.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let ln_s = my - slope * mx;
        let res = (env
            .iter()
            .map(|p| (p.1 - (ln_s + slope * p.0)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        ((-slope).max(0.0), ln_s, res)
    };
    let sigma = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(lam, v)| v * (1.0 + lam).powf(tau))
        .fold(f64::INFINITY, f64::min);
    Some(Fit {
        sigma,
        tau,
        sigma_fit: ln_s.exp(),
        residual,
        points: env.len(),
    })
}

fn scan_block_eigen(
    sites: &[super::action::ModeSite],
    pres: &GroupPresentation,
    which: Which,
) -> (usize, Option<f64>, usize, Option<String>) {
    let per: Vec<_> = sites.iter().map(|s| mode_eigen(s, pres, which)).collect();
    let comps = sites.first().map(|s| s.comps).unwrap_or(1);
    let dim = sites.len() * comps * sites.first().map(|s| s.mult.len()).unwrap_or(0);
    let norm = per
        .iter()
        .flat_map(|e| e.values.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = kernel_threshold(dim, norm);
    let mut min: Option<(f64, usize)> = None;
    let mut kernel = 0;
    for (i, e) in per.iter().enumerate() {
        for &v in &e.values {
            if v <= thr {
                kernel += comps;
            } else if min.is_none_or(|(m, _)| v < m) {
                min = Some((v, i));
            }
        }
    }
    (
        dim,
        min.map(|m| m.0),
        kernel,
        min.map(|(_, i)| sites[i].label.to_string()),
    )
}

/// Scan all blocks with key <= max_sq for the chosen Diophantine flavor.
/// Every implemented action is diagonal in the mode basis, so the dolgopyat
/// min-max reduces to a per-mode maximum over generators.
pub fn diophantine_scan(
    action: &MultiplierAction,
    pres: &GroupPresentation,
    flavor: Flavor,
    max_sq: u64,
) -> Result<DiophantineReport> {
    if max_sq < 1 {
        return Err(Error::InvalidInput("maxSqNorm must be at least 1".into()));
    }
    let blocks: Vec<_> = action.blocks_up_to(max_sq).into_iter().collect();
    let per_block: Vec<BlockEntry> = blocks
        .par_iter()
        .map(|(sq, sites)| {
            let lambda = (*sq as f64).sqrt();
            match flavor {
                Flavor::Dolgopyat => {
                    let comps = sites.first().map(|s| s.comps).unwrap_or(1);
                    let mut min: Option<(f64, usize)> = None;
                    let mut kernel = 0;
                    let mut witness = None;
                    for (i, s) in sites.iter().enumerate() {
                        let resonant = s.fixed.iter().all(|&f| f);
                        let v = s
                            .mult
                            .iter()
                            .zip(&s.fixed)
                            .map(|(m, &f)| if f { 0.0 } else { (1.0 - m).norm() })
                            .fold(0.0, f64::max);
                        if resonant || v < 1e-14 {
                            kernel += comps;
                            let canonical = matches!(&s.label, ModeLabel::Torus(k) if k.is_canonical())
                                || !matches!(s.label, ModeLabel::Torus(_));
                            if witness.is_none() && canonical {
                                witness = Some(s.label.to_string());
                            }
                        } else if min.is_none_or(|(m, _)| v < m) {
                            min = Some((v, i));
                        }
                    }
                    BlockEntry {
                        sq_norm: *sq,
                        lambda,
                        dim: sites.len() * comps,
                        min_nonzero: min.map(|m| m.0),
                        kernel_dim: kernel,
                        witness: witness.or(min.map(|(_, i)| sites[i].label.to_string())),
                    }
                }
                _ => {
                    let which = match flavor {
                        Flavor::D0 => Which::D0D0Star,
                        Flavor::Box => Which::Box,
                        _ => Which::D1StarD1,
                    };
                    let (dim, min, kernel, witness) = scan_block_eigen(sites, pres, which);
                    BlockEntry {
                        sq_norm: *sq,
                        lambda,
                        dim,
                        min_nonzero: min,
                        kernel_dim: kernel,
                        witness,
                    }
                }
            }
        })
        .collect();

    let points: Vec<(f64, f64)> = per_block
        .iter()
        .filter(|b| b.sq_norm > 0)
        .filter_map(|b| b.min_nonzero.map(|v| (b.lambda, v)))
        .collect();
    let fit = fit_envelope(&points);
    let diophantine = fit
        .as_ref()
        .is_some_and(|f| f.residual < 0.5 && f.sigma > 0.0 && f.sigma.is_finite());

    let (mut failed, mut witness, mut witness_lambda) = (false, None, None);
    if flavor == Flavor::Dolgopyat {
        for b in per_block.iter().filter(|b| b.sq_norm > 0 && b.kernel_dim > 0) {
            failed = true;
            witness = b.witness.clone();
            witness_lambda = Some(b.lambda);
        }
    }
    Ok(DiophantineReport {
        flavor,
        max_sq_norm: max_sq,
        per_block,
        fit,
        diophantine: diophantine && !failed,
        dolgopyat_failed: failed,
        resonant_witness: witness,
        resonant_witness_lambda: witness_lambda,
    })
}
