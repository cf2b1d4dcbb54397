use thiserror::Error;

/// Every failure the library can report. Variants carry enough context to
/// be printed directly by a front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("quantity is unbounded: {0}")]
    Unbounded(String),
    #[error("unsupported alpha: {0}")]
    UnsupportedAlpha(String),
    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),
    #[error("inconsistent U on a collapsed interval: {0}")]
    InconsistentU(String),
    #[error("measure dominance violated: {0}")]
    DominanceViolation(String),
    #[error("state is not admissible: {0}")]
    InvalidState(String),
    #[error("time {t} lies outside the computed horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },
    #[error("linear program failed: {0}")]
    LinearProgram(String),
    #[error("invalid distance table: {0}")]
    InvalidTable(String),
}

pub type Result<T> = std::result::Result<T, HsError>;
