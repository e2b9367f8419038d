use kohn_core::oracle::OracleError;
use kohn_core::{GroebnerError, KohnError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    TypeCap(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// The command ran but reported failures; the report is already printed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::TypeCap(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Usage(_) => 5,
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }
}

impl From<GroebnerError> for CliError {
    fn from(e: GroebnerError) -> Self {
        match e {
            GroebnerError::TypeCapExceeded { .. } | GroebnerError::NotPrimary => {
                CliError::TypeCap(e.to_string())
            }
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<KohnError> for CliError {
    fn from(e: KohnError) -> Self {
        match e {
            KohnError::Groebner(g) => g.into(),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TypeNotFound { .. } => CliError::TypeCap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
