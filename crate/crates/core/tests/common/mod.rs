#![allow(dead_code)]

use isokam::complex::{Angle, GroupPresentation, ModeLabel, MultiplierAction};
use isokam::spectral::{Cochain, Coeff, Freq, VectorFieldSpectrum, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cplx(rng: &mut ChaCha8Rng, amp: f64) -> C64 {
    C64::new(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))
}

/// Canonical frequencies with every component in [-max_abs, max_abs].
pub fn canonical_box(dim: usize, max_abs: i32) -> Vec<Freq> {
    let side = (2 * max_abs + 1) as usize;
    let mut out = Vec::new();
    for idx in 0..side.pow(dim as u32) {
        let mut r = idx;
        let k: Vec<i32> = (0..dim)
            .map(|_| {
                let v = (r % side) as i32 - max_abs;
                r /= side;
                v
            })
            .collect();
        let f = Freq::new(&k);
        if f.is_canonical() {
            out.push(f);
        }
    }
    out
}

/// Random real field with coefficients uniform in the square of half-width `amp`.
pub fn random_field(rng: &mut ChaCha8Rng, dim: usize, max_abs: i32, amp: f64) -> VectorFieldSpectrum {
    let mut half = BTreeMap::new();
    for k in canonical_box(dim, max_abs) {
        let c: Coeff = (0..dim)
            .map(|_| {
                let z = cplx(rng, amp);
                if k.is_zero() {
                    C64::new(z.re, 0.0)
                } else {
                    z
                }
            })
            .collect();
        half.insert(k, c);
    }
    VectorFieldSpectrum::from_half(dim, half).unwrap()
}

/// Random field with a random sparse support and coefficients decaying like (1+|k|)^-decay.
pub fn random_sparse_field(rng: &mut ChaCha8Rng, dim: usize, max_abs: i32, amp: f64, decay: f64) -> VectorFieldSpectrum {
    let mut half = BTreeMap::new();
    for k in canonical_box(dim, max_abs) {
        if rng.gen_bool(0.5) {
            continue;
        }
        let s = amp / (1.0 + k.norm()).powf(decay);
        let c: Coeff = (0..dim)
            .map(|_| {
                let z = cplx(rng, s);
                if k.is_zero() {
                    C64::new(z.re, 0.0)
                } else {
                    z
                }
            })
            .collect();
        half.insert(k, c);
    }
    VectorFieldSpectrum::from_half(dim, half).unwrap()
}

pub fn random_cochain(rng: &mut ChaCha8Rng, len: usize, dim: usize, max_abs: i32, amp: f64) -> Cochain {
    Cochain::new((0..len).map(|_| random_field(rng, dim, max_abs, amp)).collect())
}

/// A torus translation model together with its translation vectors in turns,
/// which the oracles below use instead of the library's multipliers.
pub struct TorusCase {
    pub name: String,
    pub turns: Vec<Vec<f64>>,
    pub pres: GroupPresentation,
    pub action: MultiplierAction,
}

impl TorusCase {
    pub fn new(name: &str, angles: Vec<Vec<Angle>>, pres: GroupPresentation) -> Self {
        let turns = angles.iter().map(|a| a.iter().map(Angle::turns).collect()).collect();
        let action = MultiplierAction::torus_translation(angles).unwrap();
        action.check_relations(&pres).unwrap();
        TorusCase {
            name: name.to_string(),
            turns,
            pres,
            action,
        }
    }

    pub fn dim(&self) -> usize {
        self.action.dim()
    }

    pub fn generators(&self) -> usize {
        self.turns.len()
    }

    /// Multiplier of pi(gamma_g)_* on e^{i<k,x>}: e^{-2 pi i <k, alpha_g>}.
    pub fn phi(&self, g: usize, k: &[i32]) -> C64 {
        let t: f64 = k.iter().zip(&self.turns[g]).map(|(&a, b)| a as f64 * b).sum();
        C64::from_polar(1.0, -TAU * t)
    }
}

fn irr(x: f64) -> Angle {
    Angle::Real(x)
}

pub fn golden_circle() -> TorusCase {
    TorusCase::new("circle:golden", vec![vec![Angle::golden()]], GroupPresentation::free(1))
}

pub fn torus_pair() -> TorusCase {
    let (s2, s3) = (2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0);
    TorusCase::new(
        "abelian T2 (sqrt2, sqrt3)",
        vec![vec![irr(s2), irr(s3)], vec![irr(s3), irr(s2)]],
        GroupPresentation::abelian(2),
    )
}

/// Free, abelian (k = 1, 2, 3) and cyclic (n = 2..8) cases on T^1 and T^2.
pub fn complex_cases() -> Vec<TorusCase> {
    let mut v = vec![
        golden_circle(),
        TorusCase::new(
            "free(2) on T2",
            vec![vec![irr(0.1234), irr(0.7189)], vec![irr(0.3333), irr(0.0917)]],
            GroupPresentation::free(2),
        ),
        TorusCase::new("abelian(1) on T1", vec![vec![irr(0.4142)]], GroupPresentation::abelian(1)),
        torus_pair(),
        TorusCase::new(
            "abelian(2) on T1",
            vec![vec![irr(0.4142)], vec![irr(0.7320)]],
            GroupPresentation::abelian(2),
        ),
        TorusCase::new(
            "abelian(3) on T2",
            vec![
                vec![irr(0.4142), irr(0.7320)],
                vec![irr(0.2360), irr(0.6457)],
                vec![irr(0.3166), irr(0.6055)],
            ],
            GroupPresentation::abelian(3),
        ),
    ];
    for n in 2..=8i64 {
        v.push(TorusCase::new(
            &format!("cyclic({n}) on T1"),
            vec![vec![Angle::rational(1, n)]],
            GroupPresentation::cyclic(n as usize),
        ));
        v.push(TorusCase::new(
            &format!("cyclic({n}) on T2"),
            vec![vec![Angle::rational(1, n), Angle::rational(n - 1, n)]],
            GroupPresentation::cyclic(n as usize),
        ));
    }
    v
}

/// Dense d0 and d1 on one block, assembled from diagonal push-forward matrices.
/// Coordinates: fields (site, comp); 1-cochains (site, comp, gen); 2-cochains (site, comp, rel).
pub struct DenseBlock {
    pub d0: DMatrix<C64>,
    pub d1: DMatrix<C64>,
}

impl DenseBlock {
    pub fn d0d0s(&self) -> DMatrix<C64> {
        &self.d0 * self.d0.adjoint()
    }
    pub fn d1sd1(&self) -> DMatrix<C64> {
        self.d1.adjoint() * &self.d1
    }
    pub fn boxed(&self) -> DMatrix<C64> {
        self.d0d0s() + self.d1sd1()
    }
}

/// Build the dense oracle from per-site multipliers `phis[site][gen]`.
pub fn dense_block(phis: &[Vec<C64>], comps: usize, pres: &GroupPresentation) -> DenseBlock {
    let k = pres.generators;
    let p = pres.num_relations();
    let nf = phis.len() * comps;
    let one = C64::new(1.0, 0.0);
    let pi = |letter: i32| -> DMatrix<C64> {
        let g = letter.unsigned_abs() as usize - 1;
        DMatrix::from_fn(nf, nf, |r, c| {
            if r != c {
                return C64::new(0.0, 0.0);
            }
            let z = phis[r / comps][g];
            if letter > 0 {
                z
            } else {
                z.conj()
            }
        })
    };
    let mut d0 = DMatrix::zeros(nf * k, nf);
    for f in 0..nf {
        for g in 0..k {
            d0[(f * k + g, f)] = one - phis[f / comps][g];
        }
    }
    let mut d1 = DMatrix::zeros(nf * p, nf * k);
    for (j, w) in pres.relations.iter().enumerate() {
        let mut prefix = DMatrix::<C64>::identity(nf, nf);
        for &letter in w {
            let g = letter.unsigned_abs() as usize - 1;
            let term = if letter > 0 {
                prefix.clone()
            } else {
                -(&prefix * pi(letter))
            };
            for r in 0..nf {
                for c in 0..nf {
                    d1[(r * p + j, c * k + g)] += term[(r, c)];
                }
            }
            prefix = &prefix * pi(letter);
        }
    }
    DenseBlock { d0, d1 }
}

/// Dense oracle for a block of a torus case, multipliers computed from the turns.
pub fn dense_torus_block(case: &TorusCase, sq: u64) -> (Vec<Freq>, DenseBlock) {
    let sites = case.action.block_sites(sq);
    let mut freqs = Vec::new();
    let phis: Vec<Vec<C64>> = sites
        .iter()
        .map(|s| {
            let ModeLabel::Torus(k) = &s.label else {
                panic!("torus block expected")
            };
            freqs.push(k.clone());
            (0..case.generators()).map(|g| case.phi(g, k.as_slice())).collect()
        })
        .collect();
    (freqs, dense_block(&phis, case.dim(), &case.pres))
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm of a complex matrix (largest singular value).
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Orthogonal projector onto the span of `v` in the Euclidean inner product.
pub fn project_onto(a: &[C64], f: &[C64]) -> Vec<C64> {
    let n2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if n2 < 1e-20 {
        return vec![C64::new(0.0, 0.0); f.len()];
    }
    let s: C64 = a.iter().zip(f).map(|(x, y)| x.conj() * y).sum();
    a.iter().map(|x| x * (s / n2)).collect()
}

/// Line for the acceptance log.
pub fn verdict(id: u32, pass: bool, detail: &str) -> String {
    format!("criterion {id:>2}: {} | {detail}", if pass { "PASS" } else { "FAIL" })
}
