use super::analytic::{band_excess, AnalyticSample};
use super::config::{schedule, Hypothesis, KamConfig, Mode, ObstructionPolicy};
use super::solver::solve_cohomological;
use super::verify::verify_conjugacy;
use crate::complex::{diophantine_scan, relation_defect, Flavor, GroupPresentation, MultiplierAction};
use crate::error::{Error, Result};
use crate::geometry::{compose_fields, conjugate_perturbation, CompositionGrid, DIFFEO_GUARD};
use crate::spectral::{
    cochain_sobolev_norm, cochain_sup_norm, cochain_weighted_norm, derivative_sup, Cochain, VectorFieldSpectrum,
};
use serde::Serialize;
use std::time::Instant;

/// Iteration state: step index, current perturbation P_m and accumulated conjugacy W_m.
#[derive(Clone, Debug)]
pub struct KamState {
    pub m: usize,
    pub p: Cochain,
    pub w: VectorFieldSpectrum,
}

impl KamState {
    pub fn new(p0: Cochain, dim: usize) -> Self {
        KamState {
            m: 0,
            p: p0,
            w: VectorFieldSpectrum::zero(dim),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub m: usize,
    pub eps_m: f64,
    /// Scheduled cutoff N_m.
    pub n_m: f64,
    /// Cutoff used, min(truncation_scale N_m, max_freq).
    pub n_used: f64,
    pub sup_before: f64,
    pub sup_after: f64,
    /// Sobolev H^2 norm of P_m.
    pub sobolev2: f64,
    /// Grid sup of the tail beyond the cutoff.
    pub tail: f64,
    /// Grid sup of the kernel part of the truncated perturbation.
    pub obstruction: f64,
    pub obstruction_threshold: f64,
    pub solver_residual: f64,
    /// Weighted norm of P_m at radius r_m (analytic mode, else 0).
    pub hardy_r_m: f64,
    /// Largest relation defect of P_{m+1} (0 without relations).
    pub relation_defect: f64,
    /// First-derivative sup of W_{m+1}.
    pub w_c1: f64,
    pub wall_ms: f64,
}

/// Everything a run produced, including partial results of failed runs.
#[derive(Clone, Debug)]
pub struct RunLog {
    pub config: KamConfig,
    pub steps: Vec<StepReport>,
    pub analytic_samples: Vec<AnalyticSample>,
    pub state: KamState,
    pub converged: bool,
    pub final_residual: f64,
    pub verify_residual: Option<f64>,
}

/// Largest entry, 0 for an empty list.
fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// One step: truncate, solve, check the obstruction, conjugate exactly and compose W.
pub fn kam_step(
    state: &KamState,
    cfg: &KamConfig,
    action: &MultiplierAction,
    pres: &GroupPresentation,
    cg: &CompositionGrid,
) -> Result<(KamState, StepReport)> {
    let t0 = Instant::now();
    let m = state.m;
    let (eps_m, n_m) = schedule(cfg, m);
    let n_used = cfg.truncation(m);
    let grid = cg.grid;
    let p = &state.p;

    let sup_before = cochain_sup_norm(p, grid)?;
    if sup_before >= 0.1 {
        return Err(Error::InvalidInput(format!(
            "perturbation sup norm {sup_before:e} is not small (needs < 0.1)"
        )));
    }
    let tail = cochain_sup_norm(&p.tail(n_used), grid)?;
    let sobolev2 = cochain_sobolev_norm(p, 2.0);
    let hardy_r_m = match cfg.mode {
        Mode::Analytic => {
            let r = cfg.radius(m);
            if let Some(shell) = band_excess(p, r, cfg.max_freq, cfg.n) {
                return Err(Error::AnalyticBandExceeded { step: m, shell });
            }
            cochain_weighted_norm(p, r, cfg.n)
        }
        Mode::Smooth => 0.0,
    };

    let sol = solve_cohomological(action, pres, &p.truncate(n_used), n_used, cfg.min_eig_floor(n_used))?;
    let obstruction = cochain_sup_norm(&sol.obstruction, grid)?;
    let obstruction_threshold = (cfg.obstruction_safety * eps_m.powf(21.0 / 16.0)).max(cfg.obstruction_floor);
    if cfg.hypothesis == Hypothesis::AlmostConjugate
        && cfg.obstruction_policy == ObstructionPolicy::Abort
        && obstruction > obstruction_threshold
    {
        return Err(Error::ObstructionTooLarge {
            step: m,
            obstruction,
            threshold: obstruction_threshold,
        });
    }
    let tolerance = 1e-10 * p.l2_norm() + 1e-300;
    if sol.residual > tolerance {
        return Err(Error::SolverResidual {
            residual: sol.residual,
            tolerance,
        });
    }

    let w_new = compose_fields(&state.w, &sol.w, cg)?;
    let w_c1 = derivative_sup(&w_new, 1, grid)?;
    if w_c1 >= DIFFEO_GUARD {
        return Err(Error::NotADiffeomorphism {
            c1: w_c1,
            limit: DIFFEO_GUARD,
        });
    }
    let p_next = conjugate_perturbation(action, p, &sol.w, cg)?;
    let sup_after = cochain_sup_norm(&p_next, grid)?;
    let defect = if pres.num_relations() > 0 {
        max_of(&relation_defect(action, pres, &p_next, cg)?)
    } else {
        0.0
    };
    let wall_ms = if cfg.wall_clock {
        t0.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let report = StepReport {
        m,
        eps_m,
        n_m,
        n_used,
        sup_before,
        sup_after,
        sobolev2,
        tail,
        obstruction,
        obstruction_threshold,
        solver_residual: sol.residual,
        hardy_r_m,
        relation_defect: defect,
        w_c1,
        wall_ms,
    };
    Ok((
        KamState {
            m: m + 1,
            p: p_next,
            w: w_new,
        },
        report,
    ))
}

/// Check that Box has no kernel on any block with |k| <= max_freq.
pub fn certify_vanishing_h1(action: &MultiplierAction, pres: &GroupPresentation, max_freq: f64) -> Result<()> {
    let r = diophantine_scan(action, pres, Flavor::Box, crate::spectral::sq_bound(max_freq).max(1))?;
    match r.per_block.iter().find(|b| b.kernel_dim > 0) {
        Some(b) => Err(Error::H1Nonvanishing {
            sq_norm: b.sq_norm,
            kernel_dim: b.kernel_dim,
        }),
        None => Ok(()),
    }
}

/// Iterate until the target residual (at least `min_steps` steps) or `max_steps`.
/// Always returns the log; the error, if any, is returned alongside it.
pub fn run_logged(
    cfg: &KamConfig,
    action: &MultiplierAction,
    pres: &GroupPresentation,
    p0: &Cochain,
) -> (RunLog, Option<Error>) {
    let mut log = RunLog {
        config: cfg.clone(),
        steps: Vec::new(),
        analytic_samples: Vec::new(),
        state: KamState::new(p0.clone(), action.dim()),
        converged: false,
        final_residual: f64::NAN,
        verify_residual: None,
    };
    let err = drive(cfg, action, pres, p0, &mut log).err();
    (log, err)
}

/// `run_logged` with the error promoted to the result.
pub fn run(cfg: &KamConfig, action: &MultiplierAction, pres: &GroupPresentation, p0: &Cochain) -> Result<RunLog> {
    match run_logged(cfg, action, pres, p0) {
        (log, None) => Ok(log),
        (_, Some(e)) => Err(e),
    }
}

fn drive(
    cfg: &KamConfig,
    action: &MultiplierAction,
    pres: &GroupPresentation,
    p0: &Cochain,
    log: &mut RunLog,
) -> Result<()> {
    cfg.validate()?;
    action.check_relations(pres)?;
    if p0.len() != action.generators() {
        return Err(Error::DimensionMismatch {
            expected: action.generators(),
            found: p0.len(),
        });
    }
    let cg = CompositionGrid::new(action.dim(), cfg.grid, cfg.max_freq)?;
    let p0 = p0.truncate(cfg.max_freq);
    log.state = KamState::new(p0.clone(), action.dim());
    if pres.num_relations() > 0 {
        let defect = max_of(&relation_defect(action, pres, &p0, &cg)?);
        if defect > cfg.relation_tol {
            return Err(Error::RelationDefect {
                defect,
                tolerance: cfg.relation_tol,
            });
        }
    }
    if cfg.hypothesis == Hypothesis::VanishingH1 {
        certify_vanishing_h1(action, pres, cfg.max_freq)?;
    }

    let mut increases = 0;
    for _ in 0..cfg.max_steps {
        let m = log.state.m;
        if cfg.mode == Mode::Analytic && m.is_multiple_of(8) {
            let j = m / 8;
            let r = cfg.radius(j);
            log.analytic_samples.push(AnalyticSample {
                k_m: m,
                m: j,
                r_m: r,
                eps_m: schedule(cfg, j).0,
                norm: cochain_weighted_norm(&log.state.p, r, cfg.n),
            });
        }
        let (next, report) = kam_step(&log.state, cfg, action, pres, &cg)?;
        log.state = next;
        log.final_residual = report.sup_after;
        let grew = report.sup_after > report.sup_before && report.sup_after > 10.0 * cfg.target_residual;
        increases = if grew { increases + 1 } else { 0 };
        let done = report.sup_after <= cfg.target_residual && log.state.m >= cfg.min_steps;
        log.steps.push(report);
        if increases >= 3 {
            return Err(Error::Diverged {
                step: m,
                residual: log.final_residual,
            });
        }
        if done {
            log.converged = true;
            break;
        }
    }
    if !log.converged {
        return Err(Error::NotConverged {
            steps: log.steps.len(),
            residual: log.final_residual,
        });
    }
    let v = verify_conjugacy(action, &p0, &log.state.w, &cg)?;
    log.verify_residual = Some(v);
    if v > 10.0 * cfg.target_residual {
        return Err(Error::VerificationFailed(format!(
            "conjugacy residual {v:e} exceeds {:e}",
            10.0 * cfg.target_residual
        )));
    }
    Ok(())
}
