use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),

    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("simplex cap exceeded: complex would contain more than {cap} simplices")]
    SimplexCapExceeded { cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numeric kind (limits, degenerate geometry) as
    /// opposed to malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::SimplexCapExceeded { .. } | Error::InvalidState(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
