use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("inconsistent curve model: {0}")]
    InconsistentModel(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("coefficient table too short: need a_n up to {needed}, have {have}")]
    CoefficientShortfall { needed: u64, have: u64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
