use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    /// Wraps a library error raised while processing `origin`.
    pub fn from_core(origin: &str, e: hhscaling::Error) -> Self {
        match e {
            hhscaling::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            e => CliError::Data(format!("{origin}: {e}")),
        }
    }
}
