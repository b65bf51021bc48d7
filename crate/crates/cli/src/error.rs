use thiserror::Error;

/// Failure classes of the runner, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verify(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<sideinfo::Error> for CliError {
    fn from(e: sideinfo::Error) -> Self {
        match e {
            sideinfo::Error::InvalidArgument(msg) => CliError::Config(msg),
            sideinfo::Error::ResourceCap(msg) => CliError::Resource(msg),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
