use thiserror::Error;

/// Exit status contract: 0 success, 1 verification failure, 2 usage or config, 3 numerical.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{} ({})", .0, .0.kind())]
    Core(#[from] wigner_core::Error),

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_config() => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
