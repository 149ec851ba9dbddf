use std::path::PathBuf;

use crate::checkpoint::CheckpointError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("config field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    Core(#[from] nsrw_core::Error),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serialization: {0}")]
    Serialize(String),
}

impl CliError {
    pub(crate) fn field(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Field {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
