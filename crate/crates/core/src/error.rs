use thiserror::Error;

/// Errors raised while building or evolving a walk.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QswError {
    #[error("malformed matrix market input at line {line}: {reason}")]
    MatrixMarket { line: usize, reason: String },
    #[error("invalid sparse matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("partition mismatch between operator and state vector")]
    PartitionMismatch,
    #[error("non-finite value encountered during {0}")]
    NonFinite(&'static str),
    #[error("no initial state has been set")]
    NoState,
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = QswError> = std::result::Result<T, E>;

impl QswError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        QswError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for QswError {
    fn from(err: std::io::Error) -> Self {
        QswError::Io(err.to_string())
    }
}
