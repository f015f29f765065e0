use std::fmt::Display;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Format(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    /// Batch run; the individual failures were already reported.
    #[error("one or more pairs failed")]
    Batch(u8),
}

impl CliError {
    pub fn format(path: &Path, e: impl Display) -> CliError {
        CliError::Format(format!("{}: {e}", path.display()))
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Format(_) | CliError::Io(..) | CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Internal(_) => 4,
            CliError::Batch(code) => *code,
        }
    }
}
