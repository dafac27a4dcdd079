use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("column {column} is linearly dependent on the preceding columns")]
    Singular { column: usize },

    #[error("column {column} has norm {norm} (unit norm required within {tolerance})")]
    NotUnitNorm {
        column: usize,
        norm: f64,
        tolerance: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from user input (bad arguments, configs,
    /// infeasible parameters) rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Singular { .. } | Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
