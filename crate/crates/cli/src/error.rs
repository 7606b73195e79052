use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("checkpoint mismatch: {0}")]
    Checkpoint(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Checkpoint(_) => 4,
        }
    }

    pub fn io(path: impl AsRef<Path>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.as_ref().to_path_buf();
        move |source| CliError::Io { path, source }
    }
}

impl From<modcat_core::Error> for CliError {
    fn from(e: modcat_core::Error) -> Self {
        match e {
            modcat_core::Error::InvariantViolation(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
