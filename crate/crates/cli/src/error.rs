use thiserror::Error;

use surftrap_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Convergence(String),

    #[error("cache corrupted: {0}")]
    Cache(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Convergence(_) => 3,
            Self::Cache(_) => 4,
            Self::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Validation(_) | CoreError::Domain(_) | CoreError::Parse { .. } => {
                Self::Config(e.to_string())
            }
            _ => Self::Convergence(e.to_string()),
        }
    }
}
