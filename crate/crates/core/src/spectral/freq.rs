use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::BTreeMap;

/// Integer frequency vector on the d-torus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Freq(pub SmallVec<[i32; 4]>);

impl Freq {
    pub fn new(k: &[i32]) -> Self {
        Freq(SmallVec::from_slice(k))
    }

    pub fn zero(dim: usize) -> Self {
        Freq(SmallVec::from_elem(0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn sq_norm(&self) -> u64 {
        self.0.iter().map(|&k| (k as i64 * k as i64) as u64).sum()
    }

    /// Euclidean length |k|, which is also the square root of the Laplace eigenvalue.
    pub fn norm(&self) -> f64 {
        (self.sq_norm() as f64).sqrt()
    }

    pub fn neg(&self) -> Freq {
        Freq(self.0.iter().map(|k| -k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// True when k is lexicographically >= -k. Exactly one of each pair {k, -k} is canonical,
    /// and the zero frequency is canonical.
    pub fn is_canonical(&self) -> bool {
        match self.0.iter().find(|&&k| k != 0) {
            None => true,
            Some(&k) => k > 0,
        }
    }

    pub fn max_abs(&self) -> u32 {
        self.0.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum()
    }
}

/// Largest integer |k|^2 allowed by a real frequency cutoff |k| <= max_freq.
pub fn sq_bound(max_freq: f64) -> u64 {
    if !max_freq.is_finite() {
        return u64::MAX;
    }
    if max_freq < 0.0 {
        return 0;
    }
    (max_freq * max_freq + 1e-9).floor() as u64
}

/// All lattice points with |k|^2 <= max_sq, grouped by |k|^2 (both ascending).
pub fn lattice_ball(dim: usize, max_sq: u64) -> BTreeMap<u64, Vec<Freq>> {
    let mut out: BTreeMap<u64, Vec<Freq>> = BTreeMap::new();
    let mut cur = vec![0i32; dim];
    fn rec(
        axis: usize,
        budget: u64,
        used: u64,
        cur: &mut Vec<i32>,
        out: &mut BTreeMap<u64, Vec<Freq>>,
    ) {
        if axis == cur.len() {
            out.entry(used).or_default().push(Freq::new(cur));
            return;
        }
        let r = (budget as f64).sqrt().floor() as i64 + 1;
        for k in -r..=r {
            let k2 = (k * k) as u64;
            if k2 > budget {
                continue;
            }
            cur[axis] = k as i32;
            rec(axis + 1, budget - k2, used + k2, cur, out);
        }
        cur[axis] = 0;
    }
    rec(0, max_sq, 0, &mut cur, &mut out);
    for v in out.values_mut() {
        v.sort();
    }
    out
}

/// Lattice points on the shell |k|^2 = sq.
pub fn lattice_shell(dim: usize, sq: u64) -> Vec<Freq> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; dim];
    fn rec(axis: usize, remaining: u64, cur: &mut Vec<i32>, out: &mut Vec<Freq>) {
        let d = cur.len();
        if axis + 1 == d {
            let r = (remaining as f64).sqrt().round() as i64;
            if (r * r) as u64 == remaining {
                if r == 0 {
                    cur[axis] = 0;
                    out.push(Freq::new(cur));
                } else {
                    for s in [-r, r] {
                        cur[axis] = s as i32;
                        out.push(Freq::new(cur));
                    }
                }
            }
            return;
        }
        let r = (remaining as f64).sqrt().floor() as i64 + 1;
        for k in -r..=r {
            let k2 = (k * k) as u64;
            if k2 > remaining {
                continue;
            }
            cur[axis] = k as i32;
            rec(axis + 1, remaining - k2, cur, out);
        }
    }
    if dim == 0 {
        return out;
    }
    rec(0, sq, &mut cur, &mut out);
    out.sort();
    out
}

/// All multi-indices of the given order in `dim` variables.
pub fn multi_indices(dim: usize, order: usize) -> Vec<SmallVec<[usize; 4]>> {
    let mut out = Vec::new();
    let mut cur: SmallVec<[usize; 4]> = SmallVec::from_elem(0, dim);
    fn rec(
        axis: usize,
        left: usize,
        cur: &mut SmallVec<[usize; 4]>,
        out: &mut Vec<SmallVec<[usize; 4]>>,
    ) {
        if axis + 1 == cur.len() {
            cur[axis] = left;
            out.push(cur.clone());
            return;
        }
        for b in (0..=left).rev() {
            cur[axis] = b;
            rec(axis + 1, left - b, cur, out);
        }
    }
    if dim == 0 {
        return out;
    }
    rec(0, order, &mut cur, &mut out);
    out
}
