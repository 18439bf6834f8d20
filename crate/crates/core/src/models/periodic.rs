use crate::complex::{
    block_matrix, block_spectrum, diophantine_scan, Angle, Flavor, GroupPresentation, MultiplierAction, Which,
};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Facts about the periodic translation action, each read off block spectra.
#[derive(Clone, Debug, Serialize)]
pub struct CertifiedFacts {
    pub orders: Vec<u64>,
    /// Cyclic order n = product of the orders.
    pub order: u64,
    pub box_max_sq_norm: u64,
    /// Distinct nonzero Box eigenvalues found, ascending.
    pub box_eigenvalues: Vec<f64>,
    /// {4 sin^2(pi t) : t in (1/n) Z, t not integer} together with n^2.
    pub predicted: Vec<f64>,
    /// (a) every Box eigenvalue matches a predicted value.
    pub all_predicted: bool,
    /// Kernel dimension of Box summed over the scanned blocks.
    pub box_kernel_dim: usize,
    /// (b) the distinct count stays within the product of the orders.
    pub within_bound: bool,
    pub scan_max_sq_norm: u64,
    /// (c) the Dolgopyat scan finds resonant modes.
    pub dolgopyat_failed: bool,
    pub resonant_witness: Option<String>,
    pub resonant_witness_lambda: Option<f64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Translation by (1/n_1, ..., 1/n_d) turns, one generator.
pub fn periodic_translation_action(orders: &[u64]) -> Result<MultiplierAction> {
    if orders.is_empty() || orders.iter().any(|&n| n < 2) {
        return Err(Error::InvalidInput("periodic orders must all be at least 2".into()));
    }
    for i in 0..orders.len() {
        for j in (i + 1)..orders.len() {
            if gcd(orders[i], orders[j]) != 1 {
                return Err(Error::NotCoprime(orders[i], orders[j]));
            }
        }
    }
    MultiplierAction::torus_translation(vec![orders.iter().map(|&n| Angle::rational(1, n as i64)).collect()])
}

fn push_distinct(set: &mut Vec<f64>, v: f64) {
    if !set.iter().any(|&s| (s - v).abs() <= 1e-9 * s.abs().max(1.0)) {
        set.push(v);
    }
}

/// Build the action and certify its spectral facts with Box blocks up to `box_max_sq`
/// and a Dolgopyat scan up to `scan_max_sq`.
pub fn certify_periodic(orders: &[u64], box_max_sq: u64, scan_max_sq: u64) -> Result<(MultiplierAction, CertifiedFacts)> {
    let action = periodic_translation_action(orders)?;
    let n: u64 = orders.iter().product();
    let pres = GroupPresentation::cyclic(n as usize);
    action.check_relations(&pres)?;

    let mut predicted = Vec::new();
    for j in 1..n {
        let s = (std::f64::consts::PI * j as f64 / n as f64).sin();
        push_distinct(&mut predicted, 4.0 * s * s);
    }
    push_distinct(&mut predicted, (n * n) as f64);
    predicted.sort_by(f64::total_cmp);

    let keys = action.block_keys(box_max_sq);
    let spectra: Vec<_> = keys
        .par_iter()
        .map(|&sq| block_matrix(&action, &pres, Which::Box, sq).map(|op| block_spectrum(&op)))
        .collect::<Result<_>>()?;
    let mut found = Vec::new();
    let mut kernel = 0;
    for s in &spectra {
        kernel += s.kernel_dim();
        for &e in s.eigenvalues.iter().filter(|&&e| e > s.threshold) {
            push_distinct(&mut found, e);
        }
    }
    found.sort_by(f64::total_cmp);
    let all_predicted = found
        .iter()
        .all(|&e| predicted.iter().any(|&p| (p - e).abs() <= 1e-9 * p.max(1.0)));

    let scan = diophantine_scan(&action, &pres, Flavor::Dolgopyat, scan_max_sq)?;
    let facts = CertifiedFacts {
        orders: orders.to_vec(),
        order: n,
        box_max_sq_norm: box_max_sq,
        within_bound: found.len() as u64 <= n,
        box_eigenvalues: found,
        predicted,
        all_predicted,
        box_kernel_dim: kernel,
        scan_max_sq_norm: scan_max_sq,
        dolgopyat_failed: scan.dolgopyat_failed,
        resonant_witness: scan.resonant_witness,
        resonant_witness_lambda: scan.resonant_witness_lambda,
    };
    Ok((action, facts))
}
