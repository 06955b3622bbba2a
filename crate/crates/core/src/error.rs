//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A pairing that requires a self-adjoint tensor was handed an
    /// asymmetric coefficient matrix.
    #[error("tensor is not symmetric: {0}")]
    NotSymmetric(String),

    /// Covariance factorization lost positive definiteness (rounding);
    /// retry with a diagonal jitter.
    #[error("covariance factorization failed at pivot {pivot}; jitter needed")]
    FactorizationFailed { pivot: usize },

    #[error("refinement did not converge: {0}")]
    NoConvergence(String),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("config error in `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: &str, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            msg: msg.into(),
        }
    }
}
