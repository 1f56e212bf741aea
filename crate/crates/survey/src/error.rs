use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::config::Mode;

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("corrupt cache record at line {line}: {reason}")]
    CacheCorrupt { line: usize, reason: String },
    #[error("I/O failure on {}: {source}", path.display())]
    IoFailure {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot emit {0} and {1} records into one file")]
    MixedModes(Mode, Mode),
    #[error("no records to emit")]
    EmptyInput,
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Core(#[from] cmorbit::Error),
}

impl SurveyError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        SurveyError::IoFailure { path: path.into(), source }
    }

    /// Process exit status: 2 for configuration problems, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SurveyError::ConfigInvalid(_) => 2,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, SurveyError>;
