//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported kernel: {0}")]
    Unsupported(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    /// A truncated series cannot meet its tail tolerance with the requested
    /// number of terms.
    #[error("series truncated too early: need about {required} terms, got {got}")]
    TruncationTooShort { required: usize, got: usize },

    #[error("grid constraint violated: {0}")]
    Grid(String),

    #[error("step-halving failed to converge within the refinement budget")]
    StepHalvingFailure,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cache file rejected: {0}")]
    Cache(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
