use std::path::PathBuf;

use contagion_core::Error as CoreError;
use thiserror::Error;

/// Command failures, each mapped to a stable exit code and a short
/// machine-readable tag printed on stderr.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Schema { path: PathBuf, line: u64, reason: String },
    #[error("{path}:{line}: negative count in column {column}")]
    NegativeCount { path: PathBuf, line: u64, column: String },
    #[error("{path}:{line}: {reason}")]
    Inconsistent { path: PathBuf, line: u64, reason: String },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] CoreError),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::NegativeCount { .. } => "negative_count",
            CliError::Inconsistent { .. } => "inconsistent_panel",
            CliError::InvalidArgument(_) => "invalid_argument",
            CliError::Model(CoreError::InsufficientData(_) | CoreError::UnderIdentified { .. }) => "insufficient_data",
            CliError::Model(_) => "model",
        }
    }

    /// Exit status; 2 is left to argument-parsing failures.
    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "io" => 3,
            "schema" => 4,
            "negative_count" => 5,
            "inconsistent_panel" => 6,
            "invalid_argument" => 7,
            "insufficient_data" => 9,
            _ => 8,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
