//! Pipeline error type. The two variants map onto the process exit codes:
//! input problems (unreadable or malformed data files) exit with 1,
//! configuration problems exit with 2.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    /// A data file is missing, unreadable or malformed.
    Input(String),
    /// The configuration file is missing, malformed or inconsistent.
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Input error pinned to a file location; `line` is 1-based.
    pub fn input_at(path: &Path, line: u64, msg: impl fmt::Display) -> Self {
        CliError::Input(format!("{}:{line}: {msg}", path.display()))
    }

    pub fn input_in(path: &Path, msg: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {msg}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type Result<T> = std::result::Result<T, CliError>;
