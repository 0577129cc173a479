use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Envelope(fluxring::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Envelope(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<fluxring::Error> for CliError {
    fn from(err: fluxring::Error) -> Self {
        use fluxring::Error::*;
        match err {
            InvalidParameter { .. } | CutoffTooSmall { .. } => CliError::Config(err.to_string()),
            _ => CliError::Envelope(err),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
