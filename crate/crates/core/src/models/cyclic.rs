use crate::complex::{d0, d0_star, d1, d1_star, ActionKind, Angle, GroupPresentation, MultiplierAction};
use crate::error::{Error, Result};
use crate::spectral::{Cochain, VectorFieldSpectrum};
use serde::Serialize;

/// Integer data of the cyclic decomposition
/// n^2 u = sum_l y_l (d0 d0*)^l u + (d1* d1) u.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicCoefficients {
    pub n: u64,
    pub y: Vec<i64>,
    /// c_table[j - 1][l] = c_l^j for 1 <= j <= floor(n/2), 0 <= l <= j, where
    /// (d0 d0*)^j = 2 c_0^j + sum_{l >= 1} c_l^j (pi^l + pi^{n-l}).
    pub c_table: Vec<Vec<i64>>,
}

impl CyclicCoefficients {
    pub fn big_j(&self) -> usize {
        self.y.len()
    }

    pub fn c(&self, l: usize, j: usize) -> i64 {
        self.c_table[j - 1].get(l).copied().unwrap_or(0)
    }

    /// n + 2 sum_l c_0^l y_l, which must equal n^2.
    pub fn alpha0(&self) -> i64 {
        self.n as i64 + 2 * (1..=self.big_j()).map(|l| self.c(0, l) * self.y[l - 1]).sum::<i64>()
    }

    /// Names of violated invariants (empty when all hold).
    pub fn check_invariants(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for j in 1..=self.big_j() {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            if self.c(j, j) != sign {
                bad.push(format!("c_{j}^{j} != (-1)^{j}"));
            }
            let s: i64 = (0..=j).map(|l| self.c(l, j)).sum();
            if s != 0 {
                bad.push(format!("sum_l c_l^{j} = {s}"));
            }
            if j >= 2 {
                for l in 2..j {
                    let want = 2 * self.c(l, j - 1) - self.c(l - 1, j - 1) - self.c(l + 1, j - 1);
                    if self.c(l, j) != want {
                        bad.push(format!("interior recurrence fails at c_{l}^{j}"));
                    }
                }
            }
        }
        let n2 = (self.n * self.n) as i64;
        if self.alpha0() != n2 {
            bad.push(format!("alpha_0 = {} != n^2 = {n2}", self.alpha0()));
        }
        bad
    }
}

/// Build the c-table by its recurrences and solve the upper-triangular system for y.
pub fn cyclic_coefficients(n: u64) -> Result<CyclicCoefficients> {
    if n < 2 {
        return Err(Error::InvalidInput("cyclic order must be at least 2".into()));
    }
    let big_j = (n / 2) as usize;
    let mut table: Vec<Vec<i64>> = vec![vec![1, -1]];
    for j in 1..big_j {
        let prev = &table[j - 1];
        let at = |l: usize| prev.get(l).copied().unwrap_or(0);
        let mut next = vec![0i64; j + 2];
        next[0] = 2 * at(0) - at(1);
        next[1] = 2 * at(1) - 2 * at(0) - at(2);
        for (l, slot) in next.iter_mut().enumerate().take(j + 1).skip(2) {
            *slot = 2 * at(l) - at(l - 1) - at(l + 1);
        }
        next[j + 1] = -at(j);
        table.push(next);
    }
    let c = |l: usize, j: usize| table[j - 1].get(l).copied().unwrap_or(0);
    let ni = n as i64;
    let mut y = vec![0i64; big_j];
    for j in (1..=big_j).rev() {
        let rhs = if j == big_j && n.is_multiple_of(2) { -ni / 2 } else { -ni };
        let acc: i64 = ((j + 1)..=big_j).map(|l| c(j, l) * y[l - 1]).sum();
        let diag = c(j, j);
        let num = rhs - acc;
        if num % diag != 0 {
            return Err(Error::InvalidInput(format!("non-integer solution at j = {j}")));
        }
        y[j - 1] = num / diag;
    }
    Ok(CyclicCoefficients { n, y, c_table: table })
}

/// Check that the single generator of `action` has exact order n.
pub fn check_order(action: &MultiplierAction, n: u64) -> Result<()> {
    let ok = match &action.kind {
        ActionKind::TorusTranslation { alphas, .. } if alphas.len() == 1 => {
            let mut lcm: i128 = 1;
            let mut exact = true;
            for a in &alphas[0] {
                match *a {
                    Angle::Rational { den, .. } => {
                        let d = den as i128;
                        let g = gcd(lcm, d);
                        lcm = lcm / g * d;
                    }
                    Angle::Real(_) => exact = false,
                }
            }
            exact && lcm == n as i128
        }
        ActionKind::SphereZRotation { angles, .. } if angles.len() == 1 => {
            matches!(angles[0], Angle::Rational { den, .. } if den as u64 == n)
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotPeriodic(n))
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// L^2 residual of u - n^{-2} (sum_l y_l (d0 d0*)^l u + d1* d1 u), computed with the field operators.
pub fn cyclic_identity_check(n: u64, action: &MultiplierAction, u: &VectorFieldSpectrum) -> Result<f64> {
    check_order(action, n)?;
    let coeffs = cyclic_coefficients(n)?;
    let pres = GroupPresentation::cyclic(n as usize);
    let dd = |v: &VectorFieldSpectrum| -> Result<VectorFieldSpectrum> {
        Ok(d0(action, &d0_star(action, &Cochain::new(vec![v.clone()]))?)?.entries.remove(0))
    };
    let mut acc = d1_star(action, &pres, &d1(action, &pres, &Cochain::new(vec![u.clone()]))?)?
        .entries
        .remove(0);
    let mut power = u.clone();
    for &yl in &coeffs.y {
        power = dd(&power)?;
        acc = acc.add(&power.scale(yl as f64));
    }
    let n2 = (n * n) as f64;
    Ok(u.sub(&acc.scale(1.0 / n2)).l2_norm())
}
