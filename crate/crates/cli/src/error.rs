use qsw_core::QswError;
use thiserror::Error;

use crate::container::ContainerError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// Process exit status: 2 config, 3 I/O, 4 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<QswError> for CliError {
    fn from(err: QswError) -> Self {
        match err {
            QswError::NonFinite(_) => CliError::Numerical(err.to_string()),
            QswError::Io(_) => CliError::Io(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ContainerError> for CliError {
    fn from(err: ContainerError) -> Self {
        CliError::Io(err.to_string())
    }
}
