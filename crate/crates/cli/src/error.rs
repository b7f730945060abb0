//! Error classes and their exit statuses.

use std::path::PathBuf;
use std::process::ExitCode;

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
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Algorithm(String),
    #[error("decoded error vector differs from the hidden one in {0} positions")]
    WrongDecoding(usize),
    #[error("{0} verification check(s) failed")]
    Verify(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Format(_) => 3,
            CliError::Algorithm(_) => 4,
            CliError::WrongDecoding(_) => 5,
            CliError::Verify(_) => 6,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn format(e: impl ToString) -> CliError {
    CliError::Format(e.to_string())
}

pub fn algorithm(e: impl ToString) -> CliError {
    CliError::Algorithm(e.to_string())
}
