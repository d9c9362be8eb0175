use std::path::PathBuf;

/// Failures that end a run, each with its documented exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// At least one hard assertion failed; outputs were still written.
    #[error("{0} assertion(s) failed")]
    Assertion(usize),
    #[error("invalid value for {key}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("unknown config key {0}")]
    UnknownKey(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("table cache {}: {reason}", path.display())]
    MissingCache { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] bv_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Assertion(_) | CliError::Core(bv_core::Error::QuadratureFailed { .. }) => 1,
            CliError::InvalidValue { .. } | CliError::Core(_) => 2,
            CliError::UnknownKey(_) | CliError::Parse(_) => 3,
            CliError::MissingCache { .. } => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub fn invalid(key: &str, reason: impl Into<String>) -> Self {
        CliError::InvalidValue { key: key.to_string(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
