use thiserror::Error;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or arguments, caught before any computation.
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Numerical(pilotwave::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    /// The property suite ran to completion and some checks failed.
    #[error("{failed} of {total} property checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for validation errors, 2 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            _ => 2,
        }
    }

    pub fn invalid(field: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{field}: {reason}"))
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

/// Constructor-level parameter errors are configuration mistakes; the rest
/// are numerical.
impl From<pilotwave::Error> for CliError {
    fn from(err: pilotwave::Error) -> Self {
        match err {
            pilotwave::Error::InvalidParameter { .. }
            | pilotwave::Error::LevelOutOfRange { .. }
            | pilotwave::Error::NotSingleWell { .. }
            | pilotwave::Error::Parse(_) => CliError::Validation(err.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
