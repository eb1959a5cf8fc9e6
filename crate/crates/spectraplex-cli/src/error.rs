//! Front-end error type and its mapping to process exit codes.

use std::path::PathBuf;

use thiserror::Error;

/// Everything the command layer can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    /// A library-level failure (validation, algebra, scheduling).
    #[error("{0}")]
    Lib(#[from] spectraplex::error::Error),

    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A game file is not syntactically valid.
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// A flag value could not be understood.
    #[error("{0}")]
    BadFlag(String),
}

impl CliError {
    /// Exit code contract: 0 ok, 1 validation failure, 2 infeasible config.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(err) => match err {
                spectraplex::error::Error::InfeasibleSchedule(_)
                | spectraplex::error::Error::HorizonTooShort { .. }
                | spectraplex::error::Error::RadiusOutOfRange { .. } => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
