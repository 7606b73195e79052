use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value claimed to satisfy a structural invariant does not.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A rule table or other configuration input is malformed.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::InvariantViolation(msg.into())
}
