use super::action::MultiplierAction;
use super::ops::push_forward;
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::geometry::{compose_fields, default_invert_tol, invert_field, CompositionGrid};
use crate::spectral::{sup_norm, Cochain, VectorFieldSpectrum};

fn diverged(e: Error) -> Error {
    match e {
        Error::BadWord(_) | Error::UnsupportedAction(_) | Error::DimensionMismatch { .. } => e,
        other => Error::CompositionDiverged(other.to_string()),
    }
}

/// Grid sup of the displacement u(W_j) of pi_P(W_j) for each relation W_j.
///
/// pi_P(g) = Exp{P(g)} o pi(g). Products are accumulated from the right:
/// u(l w) = u(l) o pi(l)_* u(w), and u(g^{-1}) = pi(g^{-1})_* invert(P(g)).
pub fn relation_defect(
    action: &MultiplierAction,
    pres: &GroupPresentation,
    p: &Cochain,
    cg: &CompositionGrid,
) -> Result<Vec<f64>> {
    if p.len() != action.generators() {
        return Err(Error::DimensionMismatch {
            expected: action.generators(),
            found: p.len(),
        });
    }
    let dim = action.dim();
    let mut inverses: Vec<Option<VectorFieldSpectrum>> = vec![None; p.len()];
    let mut out = Vec::with_capacity(pres.num_relations());
    for w in &pres.relations {
        pres.check_word(w)?;
        let mut acc = VectorFieldSpectrum::zero(dim);
        for &letter in w.iter().rev() {
            let g = letter.unsigned_abs() as usize - 1;
            let u_letter = if letter > 0 {
                p.entries[g].clone()
            } else {
                if inverses[g].is_none() {
                    let pg = &p.entries[g];
                    let inv = invert_field(pg, cg, default_invert_tol(pg), 200).map_err(diverged)?;
                    inverses[g] = Some(inv);
                }
                push_forward(action, &[letter], inverses[g].as_ref().unwrap())?
            };
            let moved = push_forward(action, &[letter], &acc)?;
            acc = compose_fields(&u_letter, &moved, cg).map_err(diverged)?;
        }
        out.push(sup_norm(&acc, cg.grid)?);
    }
    Ok(out)
}
