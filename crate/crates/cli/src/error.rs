use thiserror::Error;

/// Failures of the command-line harness, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

impl From<formetric::Error> for CliError {
    fn from(e: formetric::Error) -> Self {
        match e {
            formetric::Error::Unsupported(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
