use super::fft::{fft_nd, grid_index, index_freq};
use super::field::{Coeff, VectorFieldSpectrum};
use super::freq::{sq_bound, Freq};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Uniform grid with `n` points per axis on the d-torus [0, 2pi)^d.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Self {
        Grid { dim, n }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    /// Coordinates of the flat grid point `idx`.
    pub fn point(&self, mut idx: usize, out: &mut [f64]) {
        let h = self.spacing();
        for a in (0..self.dim).rev() {
            out[a] = (idx % self.n) as f64 * h;
            idx /= self.n;
        }
    }

    /// Check that a spectrum with largest |k_i| = `max_abs` is resolved without aliasing.
    pub fn check_resolves(&self, max_abs: u32) -> Result<()> {
        let required = 2 * max_abs as usize + 1;
        if self.n < required {
            return Err(Error::AliasRisk {
                grid: self.n,
                max_freq: max_abs as f64,
                required,
            });
        }
        Ok(())
    }

    /// Check the composition rule G >= 4 * maxFreq.
    pub fn check_composition(&self, max_freq: f64) -> Result<()> {
        let required = (4.0 * max_freq).ceil() as usize;
        if self.n < required.max(1) {
            return Err(Error::AliasRisk {
                grid: self.n,
                max_freq,
                required,
            });
        }
        Ok(())
    }
}

/// Real samples of a vector field, component-major: `comps[c][flat index]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridValues {
    pub grid: Grid,
    pub comps: Vec<Vec<f64>>,
}

impl GridValues {
    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        GridValues {
            grid,
            comps: vec![vec![0.0; grid.len()]; ncomp],
        }
    }

    /// max over grid points of the Euclidean norm across components.
    pub fn sup_euclid(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.grid.len() {
            let s: f64 = self.comps.iter().map(|c| c[i] * c[i]).sum();
            best = best.max(s);
        }
        best.sqrt()
    }

    pub fn sup_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluate one scalar component on the grid via inverse FFT.
fn eval_component(field: &VectorFieldSpectrum, comp: usize, grid: Grid) -> Vec<f64> {
    let mut buf = vec![C64::new(0.0, 0.0); grid.len()];
    for (k, c) in field.modes() {
        buf[grid_index(k.as_slice(), grid.n)] += c[comp];
    }
    fft_nd(&mut buf, grid.n, grid.dim, true);
    buf.into_iter().map(|z| z.re).collect()
}

/// Evaluate a real field on the grid.
pub fn eval_on_grid(field: &VectorFieldSpectrum, grid: Grid) -> Result<GridValues> {
    if grid.dim != field.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            found: grid.dim,
        });
    }
    grid.check_resolves(field.max_abs_component())?;
    let comps = (0..field.dim())
        .map(|c| eval_component(field, c, grid))
        .collect();
    Ok(GridValues { grid, comps })
}

/// Result of projecting grid samples back to a truncated spectrum.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub field: VectorFieldSpectrum,
    /// L^2 energy (squared norm) of the discrete spectrum that fell outside |k| <= maxFreq.
    pub discarded: f64,
    /// Total L^2 energy of the samples.
    pub total: f64,
}

/// Project grid samples to the spectrum truncated at |k| <= max_freq.
pub fn from_samples_with_loss(values: &GridValues, max_freq: f64) -> Result<Sampled> {
    let grid = values.grid;
    let dim = grid.dim;
    if values.comps.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: values.comps.len(),
        });
    }
    let required = (2.0 * max_freq).floor() as usize + 1;
    if grid.n < required {
        return Err(Error::AliasRisk {
            grid: grid.n,
            max_freq,
            required,
        });
    }
    let bound = sq_bound(max_freq);
    let norm = 1.0 / grid.len() as f64;
    let mut modes: BTreeMap<Freq, Coeff> = BTreeMap::new();
    let mut discarded = 0.0;
    let mut total = 0.0;
    let mut k = vec![0i32; dim];
    for (c, samples) in values.comps.iter().enumerate() {
        let mut buf: Vec<C64> = samples.iter().map(|&v| C64::new(v, 0.0)).collect();
        fft_nd(&mut buf, grid.n, dim, false);
        for (idx, z) in buf.iter().enumerate() {
            let z = z * norm;
            let e = z.norm_sqr();
            total += e;
            index_freq(idx, grid.n, dim, &mut k);
            let sq: u64 = k.iter().map(|&x| (x as i64 * x as i64) as u64).sum();
            if sq <= bound {
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                modes
                    .entry(Freq::new(&k))
                    .or_insert_with(|| smallvec::SmallVec::from_elem(C64::new(0.0, 0.0), dim))[c] = z;
            } else {
                discarded += e;
            }
        }
    }
    let field = VectorFieldSpectrum::symmetrized(dim, modes);
    Ok(Sampled {
        field,
        discarded,
        total,
    })
}

/// Project grid samples to the spectrum truncated at |k| <= max_freq.
pub fn from_samples(values: &GridValues, max_freq: f64) -> Result<VectorFieldSpectrum> {
    from_samples_with_loss(values, max_freq).map(|s| s.field)
}

/// Direct (non-FFT) evaluation at arbitrary points. Cost is O(points * modes).
pub fn eval_at_points(field: &VectorFieldSpectrum, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = field.dim();
    let kmax = field.max_abs_component() as usize;
    let width = 2 * kmax + 1;
    let mut out = Vec::with_capacity(points.len());
    let mut table = vec![C64::new(0.0, 0.0); dim * width];
    for x in points {
        // table[a][m + kmax] = e^{i m x_a}
        for a in 0..dim {
            let base = C64::from_polar(1.0, x[a]);
            let row = &mut table[a * width..(a + 1) * width];
            row[kmax] = C64::new(1.0, 0.0);
            for m in 1..=kmax {
                let p = row[kmax + m - 1] * base;
                row[kmax + m] = p;
                row[kmax - m] = p.conj();
            }
        }
        let mut acc = vec![0.0; dim];
        for (k, c) in field.modes() {
            let mut e = C64::new(1.0, 0.0);
            for (a, &ka) in k.as_slice().iter().enumerate() {
                e *= table[a * width + (ka + kmax as i32) as usize];
            }
            for (v, z) in acc.iter_mut().zip(c) {
                *v += (z * e).re;
            }
        }
        out.push(acc);
    }
    out
}
