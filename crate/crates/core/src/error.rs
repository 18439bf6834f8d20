use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("reality condition violated at frequency {freq:?} (mismatch {mismatch:e})")]
    RealityViolation { freq: Vec<i32>, mismatch: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid of {grid} points per axis cannot resolve max frequency {max_freq} (need at least {required})")]
    AliasRisk {
        grid: usize,
        max_freq: f64,
        required: usize,
    },

    #[error("composition pushed energy {ratio:e} (relative) beyond the truncation band")]
    AliasOverflow { ratio: f64 },

    #[error("bad word: {0}")]
    BadWord(String),

    #[error("block |k|^2 = {0} is empty")]
    EmptyBlock(u64),

    #[error("operation not supported for this action: {0}")]
    UnsupportedAction(String),

    #[error("relations are not satisfied by the action: {0}")]
    InconsistentRelations(String),

    #[error("composition diverged: {0}")]
    CompositionDiverged(String),

    #[error("displacement is not a diffeomorphism: C1 norm {c1} >= {limit}")]
    NotADiffeomorphism { c1: f64, limit: f64 },

    #[error("fixed point iteration did not converge after {iterations} iterations (last update {last:e})")]
    NoConvergence { iterations: usize, last: f64 },

    #[error("rotation number needs a circle map (dimension 1), got dimension {0}")]
    NotCircle(usize),

    #[error("block |k|^2 = {sq_norm}: eigenvalue {eigenvalue:e} below floor {floor:e}")]
    IllConditionedBlock {
        sq_norm: u64,
        eigenvalue: f64,
        floor: f64,
    },

    #[error("obstruction {obstruction:e} exceeds threshold {threshold:e} at step {step}")]
    ObstructionTooLarge {
        step: usize,
        obstruction: f64,
        threshold: f64,
    },

    #[error("solver residual {residual:e} exceeds {tolerance:e}")]
    SolverResidual { residual: f64, tolerance: f64 },

    #[error("iteration diverged at step {step}: residual {residual:e}")]
    Diverged { step: usize, residual: f64 },

    #[error("did not reach the target residual in {steps} steps (last residual {residual:e})")]
    NotConverged { steps: usize, residual: f64 },

    #[error("analytic band exceeded at step {step}: outer shell weight {shell:e}")]
    AnalyticBandExceeded { step: usize, shell: f64 },

    #[error("relation defect {defect:e} exceeds tolerance {tolerance:e}")]
    RelationDefect { defect: f64, tolerance: f64 },

    #[error("first cohomology does not vanish: block |k|^2 = {sq_norm} has harmonic dimension {kernel_dim}")]
    H1Nonvanishing { sq_norm: u64, kernel_dim: usize },

    #[error("action is not periodic of order {0}")]
    NotPeriodic(u64),

    #[error("periods {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
