use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(nhmagic::Error),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write CSV {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{failed} of {total} acceptance criteria failed")]
    Acceptance { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } | CliError::Csv { .. } => 3,
            CliError::Acceptance { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<nhmagic::Error> for CliError {
    fn from(e: nhmagic::Error) -> Self {
        use nhmagic::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::UnphysicalBloch { .. }
            | E::InvalidAlpha(_)
            | E::InvalidDensityMatrix(_)
            | E::DimensionMismatch { .. }
            | E::TooManyQubits(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
