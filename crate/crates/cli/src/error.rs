use geodloom::GeomError;
use thiserror::Error;

/// Failures mapped onto the process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Scene, flag or name errors (exit 1).
    #[error("schema error: {0}")]
    Schema(String),
    /// A geometric precondition failed (exit 2).
    #[error("{0}")]
    Precondition(#[from] GeomError),
    /// An identity check exceeded its tolerance (exit 3).
    #[error("identity check failed: {0}")]
    Identity(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::Identity(_) => 3,
        }
    }
}
