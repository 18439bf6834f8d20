//! The iterative conjugation scheme: schedule, cohomological solve, exact conjugation,
//! obstruction monitoring and verification.

mod analytic;
mod config;
mod engine;
mod output;
mod solver;
mod verify;

pub use analytic::{analytic_track, band_excess, AnalyticReport, AnalyticSample};
pub use config::{schedule, Hypothesis, KamConfig, Mode, ObstructionPolicy};
pub use engine::{certify_vanishing_h1, kam_step, run, run_logged, KamState, RunLog, StepReport};
pub use output::{fmt17, prepare, write_final_json, write_steps_csv, FinalReport, PreparedRun, RunSpec, STEPS_COLUMNS};
pub use solver::{solve_cohomological, CohomologicalSolution};
pub use verify::{almost_conjugacy_check, verify_conjugacy, AlmostConjugacyReport};
