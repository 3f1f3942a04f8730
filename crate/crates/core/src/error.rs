use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("format error at row {row}: {message}")]
    Format { row: usize, message: String },

    #[error("cannot parse {value:?} at row {row}, column {column}")]
    Parse {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("shape mismatch: expected {expected} features, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} out of range for dimensionality {dim}")]
    Index { index: usize, dim: usize },

    #[error("dataset has no labels")]
    MissingLabels,

    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),

    #[error("degenerate histogram: feature {0} has zero total mass")]
    DegenerateHistogram(usize),

    #[error("invalid state transition: {0}")]
    State(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error originates from malformed or unsuitable input data
    /// (as opposed to bad parameters or a runtime failure).
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Csv(_)
                | Error::EmptyInput(_)
                | Error::Format { .. }
                | Error::Parse { .. }
                | Error::Shape { .. }
                | Error::MissingLabels
                | Error::DegenerateTraining(_)
                | Error::DegenerateHistogram(_)
        )
    }
}
