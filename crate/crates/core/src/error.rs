use thiserror::Error;

/// Failures reported by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input is valid but the requested construction has no content,
    /// e.g. diagonalizing an uncoupled pair.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A covariance matrix failed an internal consistency check
    /// (negative discriminant, non-positive determinant).
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
