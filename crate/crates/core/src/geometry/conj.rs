use super::map::{compose_fields, default_invert_tol, invert_field, CompositionGrid, TorusMap};
use crate::complex::{push_forward, MultiplierAction};
use crate::error::{Error, Result};
use crate::spectral::{Cochain, VectorFieldSpectrum};
use rayon::prelude::*;

/// pi(word) o Exp{w} o pi(word)^{-1} = Exp{pi(word)_* w}.
pub fn isometry_conjugation(action: &MultiplierAction, word: &[i32], w: &TorusMap) -> Result<TorusMap> {
    Ok(TorusMap::from_displacement(push_forward(action, word, w.displacement())?))
}

/// Net translation (radians) of pi(word) for a torus translation action.
pub fn word_translation(action: &MultiplierAction, word: &[i32]) -> Result<Vec<f64>> {
    let t = action
        .translations()
        .ok_or_else(|| Error::UnsupportedAction("not a torus translation".into()))?;
    let mut out = vec![0.0; action.dim()];
    for &l in word {
        let a = &t[l.unsigned_abs() as usize - 1];
        for (o, x) in out.iter_mut().zip(a) {
            *o += l.signum() as f64 * x;
        }
    }
    Ok(out)
}

/// P' with Exp{P'(g)} o pi(g) = Exp{y}^{-1} o Exp{P(g)} o pi(g) o Exp{y}, for each generator g.
/// Uses pi(g) o Exp{y} = Exp{pi(g)_* y} o pi(g), so P'(g) = y~ o P(g) o pi(g)_* y by composition.
pub fn conjugate_perturbation(
    action: &MultiplierAction,
    p: &Cochain,
    y: &VectorFieldSpectrum,
    cg: &CompositionGrid,
) -> Result<Cochain> {
    if y.is_empty() {
        return Ok(p.clone());
    }
    let y_inv = invert_field(y, cg, default_invert_tol(y), 200)?;
    conjugate_perturbation_with_inverse(action, p, y, &y_inv, cg)
}

/// Same as `conjugate_perturbation` with the inverse displacement of y supplied.
pub fn conjugate_perturbation_with_inverse(
    action: &MultiplierAction,
    p: &Cochain,
    y: &VectorFieldSpectrum,
    y_inv: &VectorFieldSpectrum,
    cg: &CompositionGrid,
) -> Result<Cochain> {
    if p.len() != action.generators() {
        return Err(Error::DimensionMismatch {
            expected: action.generators(),
            found: p.len(),
        });
    }
    let entries: Result<Vec<_>> = p
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, pl)| {
            let py = push_forward(action, &[i as i32 + 1], y)?;
            let inner = compose_fields(pl, &py, cg)?;
            compose_fields(y_inv, &inner, cg)
        })
        .collect();
    Ok(Cochain::new(entries?))
}
