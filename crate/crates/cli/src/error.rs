use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Errors surfaced to the user, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<sphere_sne::Error> for CliError {
    fn from(e: sphere_sne::Error) -> Self {
        use sphere_sne::Error as E;
        match e {
            E::Domain(_) | E::DimensionMismatch { .. } | E::NotUnitNorm { .. } | E::EmptyCluster(_) => {
                CliError::Validation(e.to_string())
            }
            E::Generation(_) | E::DegenerateCenter(_) | E::Numeric(_) => CliError::Numeric(e.to_string()),
        }
    }
}
