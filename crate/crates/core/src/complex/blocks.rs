//! Per-block assembly of d0 d0*, d1* d1 and Box.
//!
//! Every implemented action is diagonal in the mode basis, so a block is a direct sum over
//! (mode, tangent component) of k x k matrices built from the per-generator multipliers.
//! Block coordinates are ordered (mode, component, generator).

use super::action::{ModeSite, MultiplierAction};
use super::presentation::GroupPresentation;
use crate::error::{Error, Result};
use crate::spectral::{Cochain, Coeff, Freq, VectorFieldSpectrum, C64};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    D0D0Star,
    D1StarD1,
    Box,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Coefficients of d0 on one mode: a_l = 1 - phi_l.
pub fn mode_d0(site: &ModeSite) -> DVector<C64> {
    DVector::from_iterator(
        site.mult.len(),
        site.mult
            .iter()
            .zip(&site.fixed)
            .map(|(m, &f)| if f { C64::new(0.0, 0.0) } else { one() - m }),
    )
}

/// Matrix of d1 on one mode (p x k). A letter +l after prefix p contributes phi(p);
/// a letter -l contributes -phi(p) conj(phi_l).
pub fn mode_d1(site: &ModeSite, pres: &GroupPresentation) -> DMatrix<C64> {
    let k = site.mult.len();
    let mut b = DMatrix::from_element(pres.num_relations(), k, C64::new(0.0, 0.0));
    for (j, w) in pres.relations.iter().enumerate() {
        let mut prefix = one();
        for &letter in w {
            let l = letter.unsigned_abs() as usize - 1;
            let phi = site.mult[l];
            if letter > 0 {
                b[(j, l)] += prefix;
                prefix *= phi;
            } else {
                b[(j, l)] -= prefix * phi.conj();
                prefix *= phi.conj();
            }
        }
    }
    b
}

/// The k x k matrix of the chosen operator on one (mode, component) slot.
pub fn mode_operator(site: &ModeSite, pres: &GroupPresentation, which: Which) -> DMatrix<C64> {
    let a = mode_d0(site);
    let aa = &a * a.adjoint();
    match which {
        Which::D0D0Star => aa,
        Which::D1StarD1 => {
            let b = mode_d1(site, pres);
            b.adjoint() * b
        }
        Which::Box => {
            let b = mode_d1(site, pres);
            aa + b.adjoint() * b
        }
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending with matching eigenvector columns.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    if n == 1 {
        return (vec![m[(0, 0)].re], DMatrix::from_element(1, 1, one()));
    }
    // symmetrize to kill round-off asymmetry before the solver sees it
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Eigenvalues below this are treated as exact zeros. The operators are built from unit
/// phases, so their natural scale is at least 1 even when a block is numerically zero.
pub fn kernel_threshold(block_dim: usize, matrix_norm: f64) -> f64 {
    1e-10 * block_dim as f64 * matrix_norm.max(1.0)
}

/// Dense matrix of one operator on one block.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub sq_norm: u64,
    pub which: Which,
    pub generators: usize,
    pub sites: Vec<ModeSite>,
    pub matrix: DMatrix<C64>,
}

impl BlockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn lambda(&self) -> f64 {
        (self.sq_norm as f64).sqrt()
    }

    /// Coordinate index of (site, component, generator).
    pub fn index(&self, site: usize, comp: usize, gen: usize) -> usize {
        let comps = self.sites.first().map(|s| s.comps).unwrap_or(1);
        (site * comps + comp) * self.generators + gen
    }

    /// Coordinates of a torus cochain restricted to this block.
    pub fn vector_of(&self, v: &Cochain) -> DVector<C64> {
        let mut out = DVector::zeros(self.dim());
        for (s, site) in self.sites.iter().enumerate() {
            let super::action::ModeLabel::Torus(k) = &site.label else {
                continue;
            };
            for (g, e) in v.entries.iter().enumerate() {
                if let Some(c) = e.get(k) {
                    for comp in 0..site.comps {
                        out[self.index(s, comp, g)] = c[comp];
                    }
                }
            }
        }
        out
    }

    /// Rebuild a torus cochain (supported on this block) from coordinates.
    /// The vector must come from a real cochain (conjugate-symmetric coordinates).
    pub fn cochain_of(&self, x: &DVector<C64>, dim: usize) -> Result<Cochain> {
        let mut maps: Vec<BTreeMap<Freq, Coeff>> = vec![BTreeMap::new(); self.generators];
        for (s, site) in self.sites.iter().enumerate() {
            let super::action::ModeLabel::Torus(k) = &site.label else {
                return Err(Error::UnsupportedAction("block is not a torus block".into()));
            };
            for (g, map) in maps.iter_mut().enumerate() {
                let c: Coeff = (0..site.comps).map(|comp| x[self.index(s, comp, g)]).collect();
                map.insert(k.clone(), c);
            }
        }
        let entries: Result<Vec<_>> = maps
            .into_iter()
            .map(|m| VectorFieldSpectrum::from_modes(dim, m))
            .collect();
        Ok(Cochain::new(entries?))
    }
}

fn assemble(sites: Vec<ModeSite>, pres: &GroupPresentation, which: Which, sq: u64, k: usize) -> BlockOperator {
    let comps = sites.first().map(|s| s.comps).unwrap_or(1);
    let n = sites.len() * comps * k;
    let mut matrix = DMatrix::zeros(n, n);
    for (s, site) in sites.iter().enumerate() {
        let m = mode_operator(site, pres, which);
        for c in 0..comps {
            let base = (s * comps + c) * k;
            matrix.view_mut((base, base), (k, k)).copy_from(&m);
        }
    }
    BlockOperator {
        sq_norm: sq,
        which,
        generators: k,
        sites,
        matrix,
    }
}

/// Dense matrix of `which` on the block with key `sq`.
pub fn block_matrix(
    action: &MultiplierAction,
    pres: &GroupPresentation,
    which: Which,
    sq: u64,
) -> Result<BlockOperator> {
    let sites = action.block_sites(sq);
    if sites.is_empty() {
        return Err(Error::EmptyBlock(sq));
    }
    Ok(assemble(sites, pres, which, sq, action.generators()))
}

#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
    pub threshold: f64,
}

impl BlockSpectrum {
    pub fn kernel_dim(&self) -> usize {
        self.eigenvalues.iter().filter(|&&e| e <= self.threshold).count()
    }

    pub fn min_nonzero(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&e| e > self.threshold)
    }

    fn columns(&self, kernel: bool) -> DMatrix<C64> {
        let idx: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| (self.eigenvalues[i] <= self.threshold) == kernel)
            .collect();
        let n = self.eigenvectors.nrows();
        let mut out = DMatrix::zeros(n, idx.len());
        for (c, &i) in idx.iter().enumerate() {
            out.set_column(c, &self.eigenvectors.column(i));
        }
        out
    }

    pub fn kernel_basis(&self) -> DMatrix<C64> {
        self.columns(true)
    }

    pub fn image_basis(&self) -> DMatrix<C64> {
        self.columns(false)
    }
}

pub fn block_spectrum(op: &BlockOperator) -> BlockSpectrum {
    let (eigenvalues, eigenvectors) = hermitian_eigen(&op.matrix);
    let norm = eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    BlockSpectrum {
        eigenvalues,
        eigenvectors,
        threshold: kernel_threshold(op.dim(), norm),
    }
}

/// Orthonormal bases of Ker Box, Im d0 and Im d1* inside one block.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub sq_norm: u64,
    pub dim: usize,
    pub kernel: DMatrix<C64>,
    pub im_d0: DMatrix<C64>,
    pub im_d1_star: DMatrix<C64>,
}

pub fn decompose_block(
    action: &MultiplierAction,
    pres: &GroupPresentation,
    sq: u64,
) -> Result<BlockDecomposition> {
    let boxed = block_spectrum(&block_matrix(action, pres, Which::Box, sq)?);
    let a = block_spectrum(&block_matrix(action, pres, Which::D0D0Star, sq)?);
    let b = block_spectrum(&block_matrix(action, pres, Which::D1StarD1, sq)?);
    Ok(BlockDecomposition {
        sq_norm: sq,
        dim: boxed.eigenvalues.len(),
        kernel: boxed.kernel_basis(),
        im_d0: a.image_basis(),
        im_d1_star: b.image_basis(),
    })
}

/// Per-mode eigen data used by scans and the solver, without assembling the dense block.
#[derive(Clone, Debug)]
pub struct ModeEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

pub fn mode_eigen(site: &ModeSite, pres: &GroupPresentation, which: Which) -> ModeEigen {
    let (values, vectors) = hermitian_eigen(&mode_operator(site, pres, which));
    ModeEigen { values, vectors }
}
