//! Field-level cochain operators. Everything here acts on whole spectra through the
//! action's push-forward; the block module assembles the same operators per mode.

use super::action::MultiplierAction;
use super::presentation::{inverse_word, GroupPresentation};
use crate::error::{Error, Result};
use crate::spectral::{Cochain, VectorFieldSpectrum};

fn check_letters(action: &MultiplierAction, word: &[i32]) -> Result<()> {
    let k = action.generators();
    for &l in word {
        if l == 0 || l.unsigned_abs() as usize > k {
            return Err(Error::BadWord(format!("letter {l} out of range for {k} generators")));
        }
    }
    Ok(())
}

/// pi(word)_* u: apply the letters right to left (the composed map is pi(l_1) ... pi(l_m)).
pub fn push_forward(action: &MultiplierAction, word: &[i32], u: &VectorFieldSpectrum) -> Result<VectorFieldSpectrum> {
    check_letters(action, word)?;
    if !action.is_torus() {
        return Err(Error::UnsupportedAction(
            "field-level push-forward needs a torus action".into(),
        ));
    }
    if word.is_empty() || u.is_empty() {
        return Ok(u.clone());
    }
    let mut out = u.clone();
    for &l in word.iter().rev() {
        let g = l.unsigned_abs() as usize - 1;
        out = out.apply_multiplier(|k| {
            let m = action.multiplier(g, k).expect("torus action");
            if l > 0 {
                m
            } else {
                m.conj()
            }
        });
    }
    Ok(out)
}

/// d0 u = (u - pi(gamma_l)_* u)_l.
pub fn d0(action: &MultiplierAction, u: &VectorFieldSpectrum) -> Result<Cochain> {
    let entries: Result<Vec<_>> = (1..=action.generators() as i32)
        .map(|l| Ok(u.sub(&push_forward(action, &[l], u)?)))
        .collect();
    Ok(Cochain::new(entries?))
}

/// d0* V = sum_l (v_l - pi(gamma_l^{-1})_* v_l).
pub fn d0_star(action: &MultiplierAction, v: &Cochain) -> Result<VectorFieldSpectrum> {
    if v.len() != action.generators() {
        return Err(Error::DimensionMismatch {
            expected: action.generators(),
            found: v.len(),
        });
    }
    let mut acc = VectorFieldSpectrum::zero(action.dim());
    for (i, vi) in v.entries.iter().enumerate() {
        let l = i as i32 + 1;
        acc = acc.add(&vi.sub(&push_forward(action, &[-l], vi)?));
    }
    Ok(acc)
}

/// Entry of V for a letter, with the inverse-letter convention v_{-l} = -pi(gamma_l^{-1})_* v_l.
fn letter_value(action: &MultiplierAction, v: &Cochain, letter: i32) -> Result<VectorFieldSpectrum> {
    let vl = &v.entries[letter.unsigned_abs() as usize - 1];
    if letter > 0 {
        Ok(vl.clone())
    } else {
        Ok(push_forward(action, &[letter], vl)?.scale(-1.0))
    }
}

/// d1 V: entry j is sum over letters z of W_j of pi(prefix before z)_* v_{letter z}.
pub fn d1(action: &MultiplierAction, pres: &GroupPresentation, v: &Cochain) -> Result<Cochain> {
    if v.len() != action.generators() {
        return Err(Error::DimensionMismatch {
            expected: action.generators(),
            found: v.len(),
        });
    }
    let mut out = Vec::with_capacity(pres.num_relations());
    for w in &pres.relations {
        check_letters(action, w)?;
        let mut acc = VectorFieldSpectrum::zero(action.dim());
        for (z, &letter) in w.iter().enumerate() {
            let val = letter_value(action, v, letter)?;
            acc = acc.add(&push_forward(action, &w[..z], &val)?);
        }
        out.push(acc);
    }
    Ok(Cochain::new(out))
}

/// Adjoint of d1. A letter +l after prefix p contributes pi(p^{-1})_* W_j to slot l;
/// a letter -l contributes -pi(gamma_l p^{-1})_* W_j.
pub fn d1_star(action: &MultiplierAction, pres: &GroupPresentation, w: &Cochain) -> Result<Cochain> {
    if w.len() != pres.num_relations() {
        return Err(Error::DimensionMismatch {
            expected: pres.num_relations(),
            found: w.len(),
        });
    }
    let mut out = vec![VectorFieldSpectrum::zero(action.dim()); action.generators()];
    for (word, wj) in pres.relations.iter().zip(&w.entries) {
        check_letters(action, word)?;
        for (z, &letter) in word.iter().enumerate() {
            let slot = letter.unsigned_abs() as usize - 1;
            let mut back = inverse_word(&word[..z]);
            let term = if letter > 0 {
                push_forward(action, &back, wj)?
            } else {
                back.insert(0, -letter);
                push_forward(action, &back, wj)?.scale(-1.0)
            };
            out[slot] = out[slot].add(&term);
        }
    }
    Ok(Cochain::new(out))
}

/// Box operator d0 d0* + d1* d1 on 1-cochains.
pub fn box_op(action: &MultiplierAction, pres: &GroupPresentation, v: &Cochain) -> Result<Cochain> {
    let a = d0(action, &d0_star(action, v)?)?;
    let b = d1_star(action, pres, &d1(action, pres, v)?)?;
    Ok(a.add(&b))
}

/// d0* d0 on 0-cochains (the Laplacian of the abelian reduction).
pub fn d0_star_d0(action: &MultiplierAction, u: &VectorFieldSpectrum) -> Result<VectorFieldSpectrum> {
    d0_star(action, &d0(action, u)?)
}
