use thiserror::Error;

/// Errors raised by the laboratory. Validation findings are data (see
/// [`crate::matroid::Violation`]) and never surface through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed caller input: bad ids, out-of-range parameters, bad symbols.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A documented precondition of an operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Random construction gave up (safety caps).
    #[error("generation failed: {0}")]
    Generation(String),
    /// The request is well-formed but outside what the operation supports.
    #[error("refused: {0}")]
    Refused(String),
    /// A numeric routine met a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
