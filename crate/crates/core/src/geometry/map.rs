use crate::error::{Error, Result};
use crate::spectral::{
    derivative_sup, eval_at_points, eval_on_grid, from_samples_with_loss, multi_indices, Grid,
    GridValues, VectorFieldSpectrum,
};

/// Guard on the first-derivative sup of displacements entering a composition.
pub const DIFFEO_GUARD: f64 = 0.25;

/// Relative L^2 energy allowed to fall outside the truncation band in one composition.
pub const ALIAS_ENERGY_TOL: f64 = 1e-10;

/// Absolute L^2 floor below which discarded energy is round-off and never an error.
const ALIAS_ABS_FLOOR: f64 = 1e-15;

/// The diffeomorphism x -> x + f(x) mod 2 pi of the flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMap {
    disp: VectorFieldSpectrum,
}

impl TorusMap {
    /// Checks sup |Df| < 1 on the grid, which makes x + f(x) a diffeomorphism.
    /// Constant parts of f are rigid translations and are not restricted.
    pub fn new(disp: VectorFieldSpectrum, grid: Grid) -> Result<Self> {
        let c1 = derivative_sup(&disp, 1, grid)?;
        if c1 >= 1.0 {
            return Err(Error::NotADiffeomorphism { c1, limit: 1.0 });
        }
        Ok(TorusMap { disp })
    }

    pub fn identity(dim: usize) -> Self {
        TorusMap {
            disp: VectorFieldSpectrum::zero(dim),
        }
    }

    /// Rigid translation by `a` (radians).
    pub fn translation(a: &[f64]) -> Self {
        TorusMap {
            disp: VectorFieldSpectrum::constant(a),
        }
    }

    pub(crate) fn from_displacement(disp: VectorFieldSpectrum) -> Self {
        TorusMap { disp }
    }

    pub fn displacement(&self) -> &VectorFieldSpectrum {
        &self.disp
    }

    pub fn into_displacement(self) -> VectorFieldSpectrum {
        self.disp
    }

    pub fn dim(&self) -> usize {
        self.disp.dim()
    }
}

/// Grid and truncation band used by every composition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositionGrid {
    pub grid: Grid,
    pub max_freq: f64,
}

impl CompositionGrid {
    /// Enforces the composition alias rule G >= 4 maxFreq.
    pub fn new(dim: usize, points: usize, max_freq: f64) -> Result<Self> {
        let grid = Grid::new(dim, points);
        grid.check_composition(max_freq)?;
        Ok(CompositionGrid { grid, max_freq })
    }
}

fn check_guard(f: &VectorFieldSpectrum, grid: Grid) -> Result<()> {
    let c1 = derivative_sup(f, 1, grid)?;
    if c1 >= DIFFEO_GUARD {
        return Err(Error::NotADiffeomorphism {
            c1,
            limit: DIFFEO_GUARD,
        });
    }
    Ok(())
}

/// Samples of w(x + v(x)) on the composition grid, given samples `vv` of v.
///
/// Small shifts use the Taylor series sum_beta d^beta w(x) v(x)^beta / beta! with FFT
/// derivatives; otherwise (or when it is cheap) the series is summed directly at the
/// shifted points.
pub fn eval_shifted(w: &VectorFieldSpectrum, vv: &GridValues, cg: &CompositionGrid) -> Result<GridValues> {
    eval_shifted_with(w, vv, cg, Strategy::Auto)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Strategy {
    Auto,
    #[cfg_attr(not(test), allow(dead_code))]
    Taylor,
}

fn eval_shifted_with(w: &VectorFieldSpectrum, vv: &GridValues, cg: &CompositionGrid, strategy: Strategy) -> Result<GridValues> {
    let grid = cg.grid;
    let dim = w.dim();
    if w.is_empty() {
        return Ok(GridValues::zeros(grid, dim));
    }
    let shift = vv.sup_abs();
    let kappa = w
        .modes()
        .keys()
        .map(|k| k.as_slice().iter().map(|x| x.unsigned_abs() as f64).sum::<f64>())
        .fold(0.0, f64::max);
    let rho = shift * kappa;
    let direct_cost = grid.len() as f64 * w.len() as f64;
    if strategy == Strategy::Auto && (direct_cost <= 2e7 || rho > 3.0) {
        return Ok(eval_shifted_direct(w, vv));
    }
    if shift == 0.0 {
        return eval_on_grid(w, grid);
    }
    // order needed so that rho^(n+1)/(n+1)! < 1e-18
    let mut order = 0usize;
    let mut term = 1.0f64;
    while term > 1e-18 && order < 60 {
        order += 1;
        term *= rho / order as f64;
    }
    let n = grid.len();
    // pw[c][j] = v_c^j / j!
    let mut pw: Vec<Vec<Vec<f64>>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut powers = vec![vec![1.0; n]];
        for j in 1..=order {
            let prev = &powers[j - 1];
            let next: Vec<f64> = prev
                .iter()
                .zip(&vv.comps[c])
                .map(|(p, v)| p * v / j as f64)
                .collect();
            powers.push(next);
        }
        pw.push(powers);
    }
    let mut out = eval_on_grid(w, grid)?;
    for ord in 1..=order {
        for beta in multi_indices(dim, ord) {
            let dw = eval_on_grid(&w.derivative(&beta), grid)?;
            let mut weight = vec![1.0; n];
            for (c, &b) in beta.iter().enumerate() {
                if b > 0 {
                    for (x, p) in weight.iter_mut().zip(&pw[c][b]) {
                        *x *= p;
                    }
                }
            }
            for c in 0..dim {
                for ((o, d), x) in out.comps[c].iter_mut().zip(&dw.comps[c]).zip(&weight) {
                    *o += d * x;
                }
            }
        }
    }
    Ok(out)
}

fn eval_shifted_direct(w: &VectorFieldSpectrum, vv: &GridValues) -> GridValues {
    let grid = vv.grid;
    let dim = w.dim();
    let mut p = vec![0.0; dim];
    let pts: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| {
            grid.point(i, &mut p);
            (0..dim).map(|c| p[c] + vv.comps[c][i]).collect()
        })
        .collect();
    let vals = eval_at_points(w, &pts);
    let mut out = GridValues::zeros(grid, dim);
    for (i, v) in vals.into_iter().enumerate() {
        for (comp, x) in out.comps.iter_mut().zip(v) {
            comp[i] = x;
        }
    }
    out
}

fn project(values: &GridValues, cg: &CompositionGrid) -> Result<VectorFieldSpectrum> {
    let s = from_samples_with_loss(values, cg.max_freq)?;
    let lost = s.discarded.sqrt();
    if lost > ALIAS_ABS_FLOOR && s.discarded > ALIAS_ENERGY_TOL * s.total {
        return Err(Error::AliasOverflow {
            ratio: s.discarded / s.total.max(f64::MIN_POSITIVE),
        });
    }
    Ok(s.field)
}

fn add_values(a: &mut GridValues, b: &GridValues, sb: f64) {
    for (ca, cb) in a.comps.iter_mut().zip(&b.comps) {
        for (x, y) in ca.iter_mut().zip(cb) {
            *x += sb * y;
        }
    }
}

/// Displacement of Exp{w} o Exp{v}: v + w o (id + v).
pub fn compose_fields(w: &VectorFieldSpectrum, v: &VectorFieldSpectrum, cg: &CompositionGrid) -> Result<VectorFieldSpectrum> {
    if w.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: v.dim(),
        });
    }
    if w.is_empty() {
        return Ok(v.clone());
    }
    if v.is_empty() {
        return Ok(w.clone());
    }
    check_guard(w, cg.grid)?;
    check_guard(v, cg.grid)?;
    let vv = eval_on_grid(v, cg.grid)?;
    let mut out = eval_shifted(w, &vv, cg)?;
    add_values(&mut out, &vv, 1.0);
    project(&out, cg)
}

/// Exp{w} o Exp{v} as a map.
pub fn compose(w: &TorusMap, v: &TorusMap, cg: &CompositionGrid) -> Result<TorusMap> {
    compose_fields(&w.disp, &v.disp, cg).map(TorusMap::from_displacement)
}

/// s1(w, v)(x) = w(x + v(x)) - w(x).
pub fn s1(w: &VectorFieldSpectrum, v: &VectorFieldSpectrum, cg: &CompositionGrid) -> Result<VectorFieldSpectrum> {
    if w.is_empty() || v.is_empty() {
        return Ok(VectorFieldSpectrum::zero(w.dim()));
    }
    let vv = eval_on_grid(v, cg.grid)?;
    let mut out = eval_shifted(w, &vv, cg)?;
    let ww = eval_on_grid(w, cg.grid)?;
    add_values(&mut out, &ww, -1.0);
    project(&out, cg)
}

/// Displacement of Exp{w}^{-1}, by the fixed point w~ = -w o (id + w~).
pub fn invert_field(w: &VectorFieldSpectrum, cg: &CompositionGrid, tol: f64, max_iter: usize) -> Result<VectorFieldSpectrum> {
    if w.is_empty() {
        return Ok(w.clone());
    }
    check_guard(w, cg.grid)?;
    let mut cur = w.scale(-1.0);
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let vv = eval_on_grid(&cur, cg.grid)?;
        let mut vals = eval_shifted(w, &vv, cg)?;
        for c in vals.comps.iter_mut() {
            for x in c.iter_mut() {
                *x = -*x;
            }
        }
        let next = project(&vals, cg)?;
        let diff: f64 = next.sub(&cur).modes().values().flat_map(|c| c.iter()).map(|z| z.norm()).sum();
        cur = next;
        // stop on a tiny update, or once the update stalls at round-off level
        if diff <= tol * 1e-3 || (diff >= last && diff <= tol) {
            break;
        }
        last = diff;
    }
    let res = inverse_residual(w, &cur, cg)?;
    if res > tol {
        return Err(Error::NoConvergence {
            iterations: max_iter,
            last: res,
        });
    }
    Ok(cur)
}

/// Grid sup of the displacement of Exp{w} o Exp{w~}, which is zero for an exact inverse.
pub fn inverse_residual(w: &VectorFieldSpectrum, inv: &VectorFieldSpectrum, cg: &CompositionGrid) -> Result<f64> {
    let vv = eval_on_grid(inv, cg.grid)?;
    let mut vals = eval_shifted(w, &vv, cg)?;
    add_values(&mut vals, &vv, 1.0);
    Ok(vals.sup_euclid())
}

pub fn invert(w: &TorusMap, cg: &CompositionGrid, tol: f64, max_iter: usize) -> Result<TorusMap> {
    invert_field(&w.disp, cg, tol, max_iter).map(TorusMap::from_displacement)
}

/// Default inversion tolerance, scaled to the displacement size.
pub fn default_invert_tol(w: &VectorFieldSpectrum) -> f64 {
    let l1: f64 = w.modes().values().flat_map(|c| c.iter()).map(|z| z.norm()).sum();
    1e-13 * l1.max(1e-3)
}
