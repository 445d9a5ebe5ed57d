use std::process::ExitCode;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0:#}")]
    Data(anyhow::Error),
    #[error("estimation error: {0:#}")]
    Estimation(anyhow::Error),
    #[error("i/o error: {0:#}")]
    Io(anyhow::Error),
}

impl RunError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Data(_) => 3,
            RunError::Estimation(_) => 4,
            RunError::Io(_) => 5,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    pub fn data(err: impl Into<anyhow::Error>) -> Self {
        RunError::Data(err.into())
    }

    pub fn estimation(err: impl Into<anyhow::Error>) -> Self {
        RunError::Estimation(err.into())
    }

    pub fn io(err: impl Into<anyhow::Error>) -> Self {
        RunError::Io(err.into())
    }
}

pub type Result<T, E = RunError> = std::result::Result<T, E>;
