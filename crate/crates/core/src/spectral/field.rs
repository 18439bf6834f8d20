use super::freq::{sq_bound, Freq};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use smallvec::SmallVec;
use std::collections::BTreeMap;

pub type Coeff = SmallVec<[C64; 3]>;

const REALITY_TOL: f64 = 1e-9;

/// Real vector field on the d-torus stored as Fourier coefficients,
/// u(x) = sum_k c_k e^{i<k,x>}, with one complex value per tangent component.
///
/// Reality c(-k) = conj(c(k)) holds for every stored spectrum. Frequencies absent
/// from the map have zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpectrum {
    dim: usize,
    modes: BTreeMap<Freq, Coeff>,
}

fn is_zero(c: &[C64]) -> bool {
    c.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

impl VectorFieldSpectrum {
    pub fn zero(dim: usize) -> Self {
        VectorFieldSpectrum {
            dim,
            modes: BTreeMap::new(),
        }
    }

    /// Build from a full coefficient map. Fails if the reality condition is off by more
    /// than round-off; small mismatches are symmetrized away.
    pub fn from_modes(dim: usize, modes: BTreeMap<Freq, Coeff>) -> Result<Self> {
        let scale = modes
            .values()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        for (k, c) in &modes {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.len(),
                });
            }
            let mk = k.neg();
            let mismatch = match modes.get(&mk) {
                Some(m) => c
                    .iter()
                    .zip(m)
                    .map(|(a, b)| (a - b.conj()).norm())
                    .fold(0.0, f64::max),
                None => c.iter().map(|z| z.norm()).fold(0.0, f64::max),
            };
            if mismatch > REALITY_TOL * scale.max(1e-300) && mismatch > 1e-300 {
                return Err(Error::RealityViolation {
                    freq: k.0.to_vec(),
                    mismatch,
                });
            }
        }
        Ok(Self::symmetrized(dim, modes))
    }

    /// Build from coefficients on canonical frequencies (k >= -k); the rest is mirrored.
    /// The zero frequency must carry a real coefficient.
    pub fn from_half(dim: usize, half: BTreeMap<Freq, Coeff>) -> Result<Self> {
        let mut modes = BTreeMap::new();
        for (k, c) in half {
            if k.dim() != dim || c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: if k.dim() != dim { k.dim() } else { c.len() },
                });
            }
            if !k.is_canonical() {
                return Err(Error::InvalidInput(format!(
                    "frequency {:?} is not canonical (k must be lexicographically >= -k)",
                    k.0
                )));
            }
            if k.is_zero() {
                let im = c.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                if im > 1e-12 * c.iter().map(|z| z.norm()).fold(1e-300, f64::max) {
                    return Err(Error::RealityViolation {
                        freq: k.0.to_vec(),
                        mismatch: im,
                    });
                }
                let c: Coeff = c.iter().map(|z| C64::new(z.re, 0.0)).collect();
                if !is_zero(&c) {
                    modes.insert(k, c);
                }
                continue;
            }
            if is_zero(&c) {
                continue;
            }
            let conj: Coeff = c.iter().map(|z| z.conj()).collect();
            modes.insert(k.neg(), conj);
            modes.insert(k, c);
        }
        Ok(VectorFieldSpectrum { dim, modes })
    }

    /// Enforce reality exactly by averaging each coefficient with the mirrored conjugate.
    pub(crate) fn symmetrized(dim: usize, modes: BTreeMap<Freq, Coeff>) -> Self {
        let mut out = BTreeMap::new();
        let zero: Coeff = SmallVec::from_elem(C64::new(0.0, 0.0), dim);
        for (k, c) in &modes {
            if !k.is_canonical() {
                continue;
            }
            let mk = k.neg();
            let m = modes.get(&mk).unwrap_or(&zero);
            let avg: Coeff = c
                .iter()
                .zip(m.iter())
                .map(|(a, b)| (a + b.conj()) * 0.5)
                .collect();
            if is_zero(&avg) {
                continue;
            }
            if k.is_zero() {
                out.insert(k.clone(), avg.iter().map(|z| C64::new(z.re, 0.0)).collect());
            } else {
                out.insert(mk, avg.iter().map(|z| z.conj()).collect());
                out.insert(k.clone(), avg);
            }
        }
        // canonical partners that only appear as -k
        for (k, c) in &modes {
            if k.is_canonical() || modes.contains_key(&k.neg()) {
                continue;
            }
            let avg: Coeff = c.iter().map(|z| z * 0.5).collect();
            if is_zero(&avg) {
                continue;
            }
            out.insert(k.neg(), avg.iter().map(|z| z.conj()).collect());
            out.insert(k.clone(), avg);
        }
        VectorFieldSpectrum { dim, modes: out }
    }

    /// Constant vector field.
    pub fn constant(v: &[f64]) -> Self {
        let dim = v.len();
        let mut modes = BTreeMap::new();
        let c: Coeff = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        if !is_zero(&c) {
            modes.insert(Freq::zero(dim), c);
        }
        VectorFieldSpectrum { dim, modes }
    }

    /// Real field c e^{i<k,x>} + conj(c) e^{-i<k,x>} (just c when k = 0, real part only).
    pub fn single_mode(k: &Freq, c: &[C64]) -> Self {
        let dim = k.dim();
        let mut half = BTreeMap::new();
        if k.is_zero() {
            half.insert(k.clone(), c.iter().map(|z| C64::new(z.re, 0.0)).collect());
        } else if k.is_canonical() {
            half.insert(k.clone(), c.iter().copied().collect());
        } else {
            half.insert(k.neg(), c.iter().map(|z| z.conj()).collect());
        }
        Self::from_half(dim, half).expect("single mode is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &BTreeMap<Freq, Coeff> {
        &self.modes
    }

    pub fn get(&self, k: &Freq) -> Option<&Coeff> {
        self.modes.get(k)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn max_sq_norm(&self) -> u64 {
        self.modes.keys().map(Freq::sq_norm).max().unwrap_or(0)
    }

    /// Largest |k| carried by the spectrum.
    pub fn max_freq(&self) -> f64 {
        (self.max_sq_norm() as f64).sqrt()
    }

    /// Largest |k_i| over all stored frequencies and axes.
    pub fn max_abs_component(&self) -> u32 {
        self.modes.keys().map(Freq::max_abs).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut modes = self.modes.clone();
        for (k, c) in &other.modes {
            let e = modes
                .entry(k.clone())
                .or_insert_with(|| SmallVec::from_elem(C64::new(0.0, 0.0), self.dim));
            for (a, b) in e.iter_mut().zip(c) {
                *a += b * s;
            }
        }
        modes.retain(|_, c| !is_zero(c));
        VectorFieldSpectrum {
            dim: self.dim,
            modes,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.dim);
        }
        let modes = self
            .modes
            .iter()
            .map(|(k, c)| (k.clone(), c.iter().map(|z| z * s).collect()))
            .collect();
        VectorFieldSpectrum {
            dim: self.dim,
            modes,
        }
    }

    /// Multiply every mode by m(k). The caller guarantees m(-k) = conj(m(k)).
    pub fn apply_multiplier(&self, m: impl Fn(&Freq) -> C64) -> Self {
        let mut modes = BTreeMap::new();
        for (k, c) in &self.modes {
            let f = m(k);
            let v: Coeff = c.iter().map(|z| z * f).collect();
            if !is_zero(&v) {
                modes.insert(k.clone(), v);
            }
        }
        VectorFieldSpectrum {
            dim: self.dim,
            modes,
        }
    }

    /// Partial derivative d^beta applied componentwise.
    pub fn derivative(&self, beta: &[usize]) -> Self {
        assert_eq!(beta.len(), self.dim);
        self.apply_multiplier(|k| {
            let mut f = C64::new(1.0, 0.0);
            for (&ki, &b) in k.as_slice().iter().zip(beta) {
                f *= C64::new(0.0, ki as f64).powu(b as u32);
            }
            f
        })
    }

    /// Keep the modes selected by `keep`; `keep` must be symmetric under k -> -k.
    pub fn filter(&self, keep: impl Fn(&Freq) -> bool) -> Self {
        VectorFieldSpectrum {
            dim: self.dim,
            modes: self
                .modes
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Projection onto |k| <= n.
    pub fn truncate(&self, n: f64) -> Self {
        let b = sq_bound(n);
        self.filter(|k| k.sq_norm() <= b)
    }

    /// Projection onto |k| > n.
    pub fn tail(&self, n: f64) -> Self {
        let b = sq_bound(n);
        self.filter(|k| k.sq_norm() > b)
    }

    pub fn project_block(&self, sq: u64) -> Self {
        self.filter(|k| k.sq_norm() == sq)
    }

    /// L^2 norm for the normalized measure, so ||1|| = 1.
    pub fn l2_norm(&self) -> f64 {
        self.modes
            .values()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// <self, other> = sum conj(self) * other over modes and components.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, a) in &self.modes {
            if let Some(b) = other.modes.get(k) {
                for (x, y) in a.iter().zip(b) {
                    acc += x.conj() * y;
                }
            }
        }
        acc
    }

    /// Sup of the coefficient moduli (an l^inf bound, not a grid sup).
    pub fn max_coeff(&self) -> f64 {
        self.modes
            .values()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

/// Cochain: one vector field per generator (1-cochain) or relation (2-cochain).
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub entries: Vec<VectorFieldSpectrum>,
}

impl Cochain {
    pub fn new(entries: Vec<VectorFieldSpectrum>) -> Self {
        Cochain { entries }
    }

    pub fn zero(len: usize, dim: usize) -> Self {
        Cochain {
            entries: vec![VectorFieldSpectrum::zero(dim); len],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries.first().map(|e| e.dim()).unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn map(&self, f: impl Fn(&VectorFieldSpectrum) -> VectorFieldSpectrum) -> Self {
        Cochain {
            entries: self.entries.iter().map(f).collect(),
        }
    }

    fn zip(
        &self,
        o: &Self,
        f: impl Fn(&VectorFieldSpectrum, &VectorFieldSpectrum) -> VectorFieldSpectrum,
    ) -> Self {
        assert_eq!(self.len(), o.len(), "cochain length mismatch");
        Cochain {
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn truncate(&self, n: f64) -> Self {
        self.map(|e| e.truncate(n))
    }

    pub fn tail(&self, n: f64) -> Self {
        self.map(|e| e.tail(n))
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, o: &Self) -> C64 {
        self.entries.iter().zip(&o.entries).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn max_sq_norm(&self) -> u64 {
        self.entries.iter().map(|e| e.max_sq_norm()).max().unwrap_or(0)
    }
}
