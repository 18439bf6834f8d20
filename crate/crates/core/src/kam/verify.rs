use crate::complex::MultiplierAction;
use crate::error::{Error, Result};
use crate::geometry::{conjugate_perturbation, CompositionGrid, DIFFEO_GUARD};
use crate::spectral::{c_r_norm, cochain_sup_norm, derivative_sup, sup_norm, Cochain, VectorFieldSpectrum};
use serde::Serialize;

/// Largest grid sup over generators of the displacement of
/// Exp{W}^{-1} o Exp{P0(g)} o pi(g) o Exp{W} o pi(g)^{-1}.
pub fn verify_conjugacy(
    action: &MultiplierAction,
    p0: &Cochain,
    w: &VectorFieldSpectrum,
    cg: &CompositionGrid,
) -> Result<f64> {
    let c1 = derivative_sup(w, 1, cg.grid)?;
    if c1 >= DIFFEO_GUARD {
        return Err(Error::NotADiffeomorphism {
            c1,
            limit: DIFFEO_GUARD,
        });
    }
    let conj = conjugate_perturbation(action, p0, w, cg)?;
    conj.entries
        .iter()
        .map(|e| sup_norm(e, cg.grid))
        .try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

#[derive(Clone, Debug, Serialize)]
pub struct AlmostConjugacyReport {
    pub pass: bool,
    pub y_c0: f64,
    pub y_cr: f64,
    /// (sum_l ||z(g_l)||_{C^0}^2)^{1/2}
    pub z_norm: f64,
    /// Grid sup of the mismatch between the conjugated perturbation and z.
    pub residual: f64,
    /// Human-readable names of the violated conditions.
    pub violated: Vec<String>,
}

/// Check the witness pair (y, z): the conjugated perturbation equals z up to `tol`,
/// ||y||_{C^0} < zeta and ||y||_{C^R} < 1/zeta. ||z|| is reported, not bounded.
#[allow(clippy::too_many_arguments)]
pub fn almost_conjugacy_check(
    action: &MultiplierAction,
    p: &Cochain,
    y: &VectorFieldSpectrum,
    z: &Cochain,
    zeta: f64,
    r: usize,
    cg: &CompositionGrid,
    tol: f64,
) -> Result<AlmostConjugacyReport> {
    if r == 0 || !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidInput("need R >= 1 and zeta in (0, 1)".into()));
    }
    let y_c0 = sup_norm(y, cg.grid)?;
    let y_cr = c_r_norm(y, r, cg.grid)?;
    let z_norm = cochain_sup_norm(z, cg.grid)?;
    let mut violated = Vec::new();
    if y_c0 >= zeta {
        violated.push(format!("||y||_C0 = {y_c0:e} >= zeta = {zeta:e}"));
    }
    if y_cr >= 1.0 / zeta {
        violated.push(format!("||y||_C{r} = {y_cr:e} >= 1/zeta = {:e}", 1.0 / zeta));
    }
    let residual = match conjugate_perturbation(action, p, y, cg) {
        Ok(conj) => cochain_sup_norm(&conj.sub(z), cg.grid)?,
        Err(e) => {
            violated.push(format!("conjugation failed: {e}"));
            f64::INFINITY
        }
    };
    if residual > tol {
        violated.push(format!("conjugation residual {residual:e} > {tol:e}"));
    }
    Ok(AlmostConjugacyReport {
        pass: violated.is_empty(),
        y_c0,
        y_cr,
        z_norm,
        residual,
        violated,
    })
}
