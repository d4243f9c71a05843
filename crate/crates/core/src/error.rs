use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid problem dimension for `{name}`: {reason}")]
    InvalidDimension { name: String, reason: String },

    #[error("matrix is not positive definite (shift {shift})")]
    NotPositiveDefinite { shift: f64 },

    #[error(
        "linear solve failed: residual {residual:e} not accepted after {iterations} iterations"
    )]
    StepFailure { residual: f64, iterations: usize },

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("cubic subproblem did not converge: {0}")]
    Subproblem(String),

    #[error("non-finite derivative at probe point {point:?}")]
    ProbeNonFinite { point: Vec<f64> },

    #[error("performance profile needs a non-empty, complete grid: {0}")]
    EmptyGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
