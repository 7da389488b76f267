use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("cutoff overflow: mode {mode} has probability {probability:e} in its top level")]
    CutoffOverflow { mode: usize, probability: f64 },
    #[error("state not representable at cutoff: tail mass {mass:e}")]
    TailMass { mass: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;
