use thiserror::Error;

/// Errors produced by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaryError {
    /// Malformed input: bad dimensions, empty lists, unparsable values.
    #[error("input error: {0}")]
    Input(String),
    /// An operation was called outside its domain (e.g. a point outside M).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The point is not a barycenter of any measure with support M.
    #[error("no witness exists: {0}")]
    Characterization(String),
}

impl BaryError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        BaryError::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        BaryError::Precondition(msg.into())
    }
}

pub type Result<T, E = BaryError> = std::result::Result<T, E>;
