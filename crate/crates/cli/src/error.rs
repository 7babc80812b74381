use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numeric(#[from] qscatter::Error),

    #[error("{failed} of {total} checks failed")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 ok, 1 validation failure, 2 usage or configuration, 3 numerics.
    pub fn exit_code(&self) -> u8 {
        use qscatter::Error as E;
        match self {
            CliError::Validation { .. } => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(E::InvalidInput(_) | E::TruncationTooTight { .. }) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
