use thiserror::Error;

use crate::lp::LpStatus;

/// Everything that can go wrong while building or running a synthesis or
/// an experiment.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{field}: {message}")]
    InvalidArgument { field: &'static str, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("phase of a zero coefficient is undefined")]
    ZeroPhase,

    #[error("lp solve failed at mm iteration {iteration}: {status:?}")]
    Lp { iteration: usize, status: LpStatus },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("series did not converge: {0}")]
    NonConvergent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            message: message.into(),
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Lp { .. } | Error::Eigen(_) | Error::NonConvergent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
