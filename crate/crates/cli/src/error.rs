//! Error-to-exit-code mapping for the command line.

use std::fmt;

use crate::report::Status;

/// Anything that stops a command; carries enough to pick the exit code and
/// the report status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable file, malformed JSON, or entries that fail validation.
    Parse(String),
    /// An error surfaced by the computation itself.
    Core(interlace_core::Error),
}

impl CliError {
    /// 2 hypothesis violated, 3 guard exceeded, 4 parse, 5 internal breach.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 4,
            CliError::Core(e) => match e {
                interlace_core::Error::HypothesisViolated(_) => 2,
                interlace_core::Error::GuardExceeded { .. } => 3,
                interlace_core::Error::InvalidInstance(_) => 4,
                _ => 5,
            },
        }
    }

    pub fn status(&self) -> Status {
        match self {
            CliError::Core(interlace_core::Error::HypothesisViolated(_)) => {
                Status::HypothesisViolated
            }
            _ => Status::Error,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<interlace_core::Error> for CliError {
    fn from(e: interlace_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
