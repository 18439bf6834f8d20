use crate::complex::{d0, kernel_threshold, mode_eigen, GroupPresentation, ModeLabel, MultiplierAction, Which};
use crate::error::{Error, Result};
use crate::spectral::{sq_bound, Coeff, Cochain, Freq, VectorFieldSpectrum, C64};
use nalgebra::DVector;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Output of one cohomological solve at cutoff N.
#[derive(Clone, Debug)]
pub struct CohomologicalSolution {
    /// Minimum-norm w in Im d0*, supported on |k| <= N.
    pub w: VectorFieldSpectrum,
    /// Image part of Pi_N u, the right-hand side actually matched by d0 w.
    pub image: Cochain,
    /// Kernel part of Pi_N u: what no coboundary can remove.
    pub obstruction: Cochain,
    /// ||d0 w - image||_{L^2}, computed with the field-level d0.
    pub residual: f64,
}

struct ModeOut {
    k: Freq,
    w: Coeff,
    image: Vec<Coeff>,
    obstruction: Vec<Coeff>,
}

/// Solve d0 w = (image part of Pi_N u) blockwise through the per-mode eigendecomposition of d0 d0*.
/// Eigenvalues at or below the block kernel threshold count as kernel; a retained eigenvalue
/// below `min_eig_floor` raises IllConditionedBlock.
pub fn solve_cohomological(
    action: &MultiplierAction,
    pres: &GroupPresentation,
    u: &Cochain,
    n_cut: f64,
    min_eig_floor: f64,
) -> Result<CohomologicalSolution> {
    let k = action.generators();
    if u.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: u.len(),
        });
    }
    if !action.is_torus() {
        return Err(Error::UnsupportedAction("the cohomological solver works on torus actions".into()));
    }
    if n_cut.is_nan() || n_cut < 0.0 {
        return Err(Error::InvalidInput("cutoff must be nonnegative".into()));
    }
    let dim = action.dim();
    let un = u.truncate(n_cut);
    let blocks: Vec<_> = action.blocks_up_to(sq_bound(n_cut)).into_iter().collect();

    let per_block: Vec<Vec<ModeOut>> = blocks
        .par_iter()
        .map(|(sq, sites)| -> Result<Vec<ModeOut>> {
            let eig: Vec<_> = sites.iter().map(|s| mode_eigen(s, pres, Which::D0D0Star)).collect();
            let norm = eig.iter().flat_map(|e| e.values.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
            let comps = sites.first().map(|s| s.comps).unwrap_or(1);
            let thr = kernel_threshold(sites.len() * comps * k, norm);
            let mut out = Vec::new();
            for (site, e) in sites.iter().zip(&eig) {
                let ModeLabel::Torus(freq) = &site.label else {
                    continue;
                };
                for &v in &e.values {
                    if v > thr && v < min_eig_floor {
                        return Err(Error::IllConditionedBlock {
                            sq_norm: *sq,
                            eigenvalue: v,
                            floor: min_eig_floor,
                        });
                    }
                }
                if !freq.is_canonical() {
                    continue;
                }
                let coeffs: Vec<Option<&Coeff>> = un.entries.iter().map(|e| e.get(freq)).collect();
                if coeffs.iter().all(Option::is_none) {
                    continue;
                }
                let zero = C64::new(0.0, 0.0);
                let a: Vec<C64> = crate::complex::mode_d0(site).iter().copied().collect();
                let mut w = Coeff::from_elem(zero, comps);
                let mut image = vec![Coeff::from_elem(zero, comps); k];
                let mut obstruction = vec![Coeff::from_elem(zero, comps); k];
                for c in 0..comps {
                    let f = DVector::from_iterator(k, coeffs.iter().map(|x| x.map_or(zero, |v| v[c])));
                    let mut f_im = DVector::from_element(k, zero);
                    let mut g = DVector::from_element(k, zero);
                    for (i, &v) in e.values.iter().enumerate() {
                        if v <= thr {
                            continue;
                        }
                        let col = e.vectors.column(i);
                        let proj = col.dotc(&f);
                        f_im += col * proj;
                        g += col * (proj / v);
                    }
                    // w = d0* g on this mode: sum_l conj(a_l) g_l
                    w[c] = a.iter().zip(g.iter()).map(|(al, gl)| al.conj() * gl).sum();
                    for l in 0..k {
                        image[l][c] = f_im[l];
                        obstruction[l][c] = f[l] - f_im[l];
                    }
                }
                out.push(ModeOut {
                    k: freq.clone(),
                    w,
                    image,
                    obstruction,
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut w_half = BTreeMap::new();
    let mut im_half = vec![BTreeMap::new(); k];
    let mut ob_half = vec![BTreeMap::new(); k];
    for m in per_block.into_iter().flatten() {
        for l in 0..k {
            im_half[l].insert(m.k.clone(), m.image[l].clone());
            ob_half[l].insert(m.k.clone(), m.obstruction[l].clone());
        }
        w_half.insert(m.k, m.w);
    }
    let real0 = |mut h: BTreeMap<Freq, Coeff>| {
        // the zero mode is real up to round-off from the eigenvectors
        if let Some(c) = h.get_mut(&Freq::zero(dim)) {
            c.iter_mut().for_each(|z| z.im = 0.0);
        }
        VectorFieldSpectrum::from_half(dim, h)
    };
    let w = real0(w_half)?;
    let image = Cochain::new(im_half.into_iter().map(real0).collect::<Result<_>>()?);
    let obstruction = Cochain::new(ob_half.into_iter().map(real0).collect::<Result<_>>()?);
    let residual = d0(action, &w)?.sub(&image).l2_norm();
    Ok(CohomologicalSolution {
        w,
        image,
        obstruction,
        residual,
    })
}
