use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fractional order s = {0} must lie strictly inside (0, 1)")]
    InvalidOrder(f64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("equilibrium under-resolved: M({v}) = {value:e} is below the clamp floor")]
    NegativeEquilibrium { v: f64, value: f64 },

    #[error("resolvent shift must be positive, got {0}")]
    NonPositiveShift(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("regime I stabilisation interval is empty (upper bound {upper} <= 2, alpha = {alpha})")]
    InfeasibleGamma { upper: f64, alpha: f64 },

    #[error("transport step is singular: gamma = alpha = {0}")]
    SingularTransport(f64),

    #[error("not enough data for a fit: {0}")]
    InsufficientData(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
