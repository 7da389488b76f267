use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("normal mode {index} has non-positive frequency {value}")]
    NonPositiveNormalMode { index: usize, value: f64 },

    #[error("dissipative mode {index} is not damped (Re = {re:e})")]
    NonDissipativeMode { index: usize, re: f64 },

    #[error("eigenvector matrix is numerically defective (condition number {condition:e})")]
    DefectiveMatrix { condition: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("stationary system is singular (min |Ω_m + Ω_n*| = {min_gap:e})")]
    SingularSystem { min_gap: f64 },

    #[error("P-function width is singular (|det J| = {det:e}); no diffusion yet")]
    SingularWidth { det: f64 },

    #[error("superposition has zero norm")]
    NullState,

    #[error("quadrature did not converge: {coarse} vs {fine}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },

    #[error("no bracket for the interference decay time on the supplied grid (ended at t = {t_end})")]
    NoBracket { t_end: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
