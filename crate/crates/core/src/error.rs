use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("ranking is constant; similarity undefined")]
    DegenerateRanking,
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("bad hyperparameter: {0}")]
    BadHyperparameter(String),
    #[error("k = {k} out of range for n = {n}")]
    BadK { k: usize, n: usize },
    #[error("separability estimate for sample {sample} did not converge")]
    SeparabilityFailure { sample: usize },
    #[error("model is degenerate: {0}")]
    DegenerateModel(String),
    #[error("labels must contain at least one positive and one negative")]
    DegenerateLabels,
    #[error("not enough data: {0}")]
    NotEnoughData(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    FormatError(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigError(_) | Error::BadHyperparameter(_) => 2,
            Error::Io { .. }
            | Error::FormatError(_)
            | Error::EmptyInput
            | Error::ShapeMismatch { .. }
            | Error::DegenerateLabels
            | Error::NotEnoughData(_)
            | Error::BadK { .. } => 3,
            Error::DegenerateRanking
            | Error::SeparabilityFailure { .. }
            | Error::DegenerateModel(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
