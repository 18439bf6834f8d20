use super::map::TorusMap;
use crate::error::{Error, Result};
use crate::spectral::C64;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RotationEstimate {
    /// Mean displacement per iterate of the lift, in radians.
    pub rho: f64,
    /// Bound on |rho - true rotation number|: 2 pi / iterations.
    pub error: f64,
}

/// Rotation number of x -> x + f(x) on the circle, from the orbit of 0 under the lift.
pub fn rotation_number(map: &TorusMap, iterations: usize) -> Result<RotationEstimate> {
    if map.dim() != 1 {
        return Err(Error::NotCircle(map.dim()));
    }
    if iterations == 0 {
        return Err(Error::InvalidInput("need at least one iteration".into()));
    }
    let f = map.displacement();
    let kmax = f.max_abs_component() as usize;
    // canonical coefficients c_0, c_1..c_K so that f(x) = c_0 + 2 Re sum c_k e^{ikx}
    let mut c = vec![C64::new(0.0, 0.0); kmax + 1];
    for (k, v) in f.modes() {
        let k = k.as_slice()[0];
        if k >= 0 {
            c[k as usize] = v[0];
        }
    }
    let mut x = 0.0f64;
    for _ in 0..iterations {
        let base = C64::from_polar(1.0, x);
        let mut e = C64::new(1.0, 0.0);
        let mut val = c[0].re;
        for ck in c.iter().skip(1) {
            e *= base;
            val += 2.0 * (ck * e).re;
        }
        x += val;
    }
    Ok(RotationEstimate {
        rho: x / iterations as f64,
        error: TAU / iterations as f64,
    })
}
