use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the estimators, theory predictors and experiment harness.
#[derive(Debug, Error)]
pub enum MrlsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// `lambda + x^H P x` was not a positive finite number, so P is no longer
    /// positive definite.
    #[error("numerical breakdown: gain denominator {denominator} is not positive and finite")]
    NumericalBreakdown { denominator: f64 },

    #[error("outside the stable domain: {0}")]
    Domain(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = MrlsError> = std::result::Result<T, E>;

impl MrlsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MrlsError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        MrlsError::Argument(msg.into())
    }
}
