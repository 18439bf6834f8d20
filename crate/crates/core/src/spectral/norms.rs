use super::field::{Cochain, VectorFieldSpectrum};
use super::freq::multi_indices;
use super::grid::{eval_on_grid, Grid};
use crate::error::Result;
use serde::Serialize;

/// Grid sup of the Euclidean norm of u(x).
pub fn sup_norm(u: &VectorFieldSpectrum, grid: Grid) -> Result<f64> {
    if u.is_empty() {
        return Ok(0.0);
    }
    Ok(eval_on_grid(u, grid)?.sup_euclid())
}

/// Grid sup of the Frobenius norm of the order-`l` derivative tensor,
/// sup_x (sum_{|beta| = l} sum_c |d^beta u_c(x)|^2)^{1/2}.
pub fn derivative_sup(u: &VectorFieldSpectrum, order: usize, grid: Grid) -> Result<f64> {
    if u.is_empty() {
        return Ok(0.0);
    }
    let mut acc = vec![0.0; grid.len()];
    for beta in multi_indices(u.dim(), order) {
        let v = eval_on_grid(&u.derivative(&beta), grid)?;
        for comp in &v.comps {
            for (a, x) in acc.iter_mut().zip(comp) {
                *a += x * x;
            }
        }
    }
    Ok(acc.into_iter().fold(0.0, f64::max).sqrt())
}

/// C^R norm: max over derivative orders l <= R of `derivative_sup`.
pub fn c_r_norm(u: &VectorFieldSpectrum, r: usize, grid: Grid) -> Result<f64> {
    let mut best: f64 = 0.0;
    for l in 0..=r {
        best = best.max(derivative_sup(u, l, grid)?);
    }
    Ok(best)
}

/// Sobolev norm (sum_k (1 + |k|)^{2R} |c_k|^2)^{1/2}; R may be fractional.
pub fn sobolev_norm(u: &VectorFieldSpectrum, r: f64) -> f64 {
    u.modes()
        .iter()
        .map(|(k, c)| {
            let w = (1.0 + k.norm()).powf(2.0 * r);
            w * c.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Analytic weighted norm (sum_k |c_k|^2 e^{2 r |k|} (1 + |k|)^{-(n-1)/2})^{1/2}.
pub fn weighted_norm(u: &VectorFieldSpectrum, r: f64, n: usize) -> f64 {
    let p = -((n as f64) - 1.0) / 2.0;
    u.modes()
        .iter()
        .map(|(k, c)| {
            let lam = k.norm();
            let w = (2.0 * r * lam).exp() * (1.0 + lam).powf(p);
            w * c.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

fn rss(it: impl Iterator<Item = f64>) -> f64 {
    it.map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cochain_sup_norm(u: &Cochain, grid: Grid) -> Result<f64> {
    let v: Result<Vec<f64>> = u.entries.iter().map(|e| sup_norm(e, grid)).collect();
    Ok(rss(v?.into_iter()))
}

pub fn cochain_c_r_norm(u: &Cochain, r: usize, grid: Grid) -> Result<f64> {
    let v: Result<Vec<f64>> = u.entries.iter().map(|e| c_r_norm(e, r, grid)).collect();
    Ok(rss(v?.into_iter()))
}

pub fn cochain_sobolev_norm(u: &Cochain, r: f64) -> f64 {
    rss(u.entries.iter().map(|e| sobolev_norm(e, r)))
}

pub fn cochain_weighted_norm(u: &Cochain, r: f64, n: usize) -> f64 {
    rss(u.entries.iter().map(|e| weighted_norm(e, r, n)))
}

/// Which norm family an interpolation check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormFlavor {
    /// Parameter is the Sobolev order R.
    Sobolev,
    /// Parameter is the analytic radius r.
    Weighted,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InterpolationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Check ||u||_{t a + (1-t) b} <= ||u||_a^t ||u||_b^{1-t}.
pub fn interpolation_check(
    u: &VectorFieldSpectrum,
    a: f64,
    b: f64,
    t: f64,
    flavor: NormFlavor,
) -> InterpolationReport {
    let norm = |s: f64| match flavor {
        NormFlavor::Sobolev => sobolev_norm(u, s),
        NormFlavor::Weighted => weighted_norm(u, s, u.dim()),
    };
    let lhs = norm(t * a + (1.0 - t) * b);
    let rhs = norm(a).powf(t) * norm(b).powf(1.0 - t);
    InterpolationReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-10) + 1e-300,
    }
}
