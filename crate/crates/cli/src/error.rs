use squeeze_core::Error as CoreError;
use thiserror::Error;

/// Exit code for configuration and usage errors.
pub const EXIT_CONFIG: u8 = 1;
/// Exit code for numerical and validation failures.
pub const EXIT_FAILURE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    /// Checks ran and at least one failed; outputs were still written.
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numerical(_) | Self::Validation(_) => EXIT_FAILURE,
        }
    }

    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::Leakage { .. }
            | CoreError::PropagationAccuracy { .. }
            | CoreError::StepSize(_)
            | CoreError::Numerical(_)
            | CoreError::TruncationTooSmall { .. } => Self::Numerical(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::from_core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
