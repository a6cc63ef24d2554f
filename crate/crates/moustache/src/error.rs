use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    /// A data file was read but its contents are malformed.
    #[error("{}: {msg}", path.display())]
    Parse { path: PathBuf, msg: String },

    #[error("simulation failed: {0}")]
    Sim(#[from] moustache_core::Error),

    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io { .. } | Self::Parse { .. } => 3,
            Self::Acceptance(_) => 4,
            Self::Sim(_) => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
