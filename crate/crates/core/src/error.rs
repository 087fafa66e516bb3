use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested state does not fit the Fock truncation.
    #[error("truncation error: discarded tail mass {loss:.3e} exceeds tolerance {tolerance:.3e} (raise the dimension or lower r)")]
    Truncation { loss: f64, tolerance: f64 },

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
