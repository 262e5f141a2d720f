use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files. Exit status 2.
    #[error("{0}")]
    Usage(String),
    /// Numerical or library failure on well-formed input. Exit status 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<fsparse_core::Error> for CliError {
    fn from(e: fsparse_core::Error) -> Self {
        match e {
            fsparse_core::Error::InvalidArgument(_)
            | fsparse_core::Error::DimensionMismatch(_)
            | fsparse_core::Error::NonCanonical(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
