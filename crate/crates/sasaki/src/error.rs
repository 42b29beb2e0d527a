use std::fmt;

use sasaki_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    VerifyFailed = 1,
    BadInput = 2,
    BoundViolated = 3,
    GridParse = 4,
}

impl fmt::Display for ExitCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as i32)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("grid file {path}: {reason}")]
    GridParse { path: String, reason: String },
    #[error("area {area} falls below bound {bound} by more than {tolerance}")]
    BoundViolation { area: f64, bound: f64, tolerance: f64 },
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DegenerateAnnulus { .. } => {
                CliError::BadInput("alpha0 must lie in (0, pi/2)".to_string())
            }
            CoreError::BoundViolation { area, bound, tolerance } => {
                CliError::BoundViolation { area, bound, tolerance }
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::BadInput(_) | CliError::Core(_) | CliError::Io(_) => ExitCode::BadInput,
            CliError::GridParse { .. } => ExitCode::GridParse,
            CliError::BoundViolation { .. } => ExitCode::BoundViolated,
            CliError::VerifyFailed(_) => ExitCode::VerifyFailed,
        }
    }
}
