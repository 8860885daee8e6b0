//! Experiment runner for pinching-antenna ISAC rate regions: configuration
//! files, parallel Monte-Carlo batches, CSV/JSON output and the `pass-isac`
//! command line.

pub mod cli;
pub mod config;
pub mod output;
pub mod runner;
pub mod verify;

pub use pass_isac_core as core;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    #[error("{0}")]
    Usage(String),

    /// The computation itself failed; exit code 1.
    #[error(transparent)]
    Numerical(#[from] pass_isac_core::Error),

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },

    /// One or more verification checks failed; exit code 1.
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }
}
