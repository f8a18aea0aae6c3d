//! Command-line front end: state specs in, entropies, thresholds, sweep
//! tables and validation reports out.
//!
//! Machine output goes to standard output as one document per invocation;
//! notices and the human summary go to standard error. Exit codes: 0 success,
//! 1 validation failure, 2 usage or parse error.

pub mod commands;
pub mod input;
pub mod output;

pub use commands::{run, Cli, Command};

/// Finished command: what to print and how to exit.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub notices: Vec<String>,
    pub exit_code: i32,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
        }
    }
}

impl From<thermal_renyi::Error> for CliError {
    fn from(e: thermal_renyi::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
