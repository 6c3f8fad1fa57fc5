use abcd::ingest::IngestError;
use abcd::purge::PurgeError;
use abcd::states::StateError;
use abcd::verify::OracleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PurgeError> for CliError {
    fn from(e: PurgeError) -> Self {
        match e {
            PurgeError::States(StateError::InvalidParameters(_)) => CliError::Usage(e.to_string()),
            PurgeError::InconsistentHarary(_) | PurgeError::States(StateError::NotBalanced(_)) => {
                CliError::Verification(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
