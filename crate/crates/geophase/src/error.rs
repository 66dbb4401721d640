use thiserror::Error;

/// Failure of a run, grouped by the process exit code it maps to.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    Parameter(geophase_core::Error),
    #[error("numerical precondition failed: {0}")]
    Numerical(geophase_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Parameter(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl From<geophase_core::Error> for RunError {
    fn from(e: geophase_core::Error) -> Self {
        if e.is_parameter_error() {
            RunError::Parameter(e)
        } else {
            RunError::Numerical(e)
        }
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.into())
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Io(e.into())
    }
}
