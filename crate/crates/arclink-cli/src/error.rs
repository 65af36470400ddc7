use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("ingestion: {0}")]
    Ingestion(String),
    #[error("no pairs runnable: {0}")]
    NoPairs(String),
    #[error(transparent)]
    Engine(#[from] arclink::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    /// Process exit code for the top-level error classes.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::NoPairs(_) => 3,
            CliError::Ingestion(_) => 2,
            CliError::Engine(_) => 1,
        }
    }
}
