use std::process::ExitCode;

use groupoid_lab::Error as LibError;
use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("cannot parse `{path}` at `{at}`: {message}")]
    Parse { path: String, at: String, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Lib(#[from] LibError),

    /// A budget ran out; the report carries what was computed.
    #[error("{message}")]
    Budget { message: String, report: Box<Report> },

    /// `--verify` found a mismatch; the report carries both values.
    #[error("{message}")]
    Mismatch { message: String, report: Box<Report> },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io { .. } => 2,
            CliError::Parse { .. } => 3,
            CliError::Invalid(_) => 4,
            CliError::Lib(LibError::BudgetExceeded { .. }) | CliError::Budget { .. } => 5,
            CliError::Lib(_) => 4,
            CliError::Mismatch { .. } => 6,
        })
    }

    /// Partial report to emit alongside the error, if any.
    pub fn report(&self) -> Option<&Report> {
        match self {
            CliError::Budget { report, .. } | CliError::Mismatch { report, .. } => Some(report),
            _ => None,
        }
    }
}
