use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("expected {expected} columns, found {found}")]
    ColumnCountMismatch { expected: usize, found: usize },

    #[error("non-numeric or non-finite cell at row {0}, column {1}")]
    NonNumericCell(usize, usize),

    #[error("dataset is empty")]
    EmptyData,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("row index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("invalid process parameters: {0}")]
    InvalidProcessRow(String),

    #[error("target dataset has no rows")]
    EmptyTarget,

    #[error("ridge system is singular")]
    SingularSystem,

    #[error("non-finite input")]
    NonFiniteInput,

    #[error("training diverged (non-finite loss)")]
    NonFiniteLoss,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("point dimensions differ")]
    DimensionMismatch,

    #[error("target needs at least 2 rows, got {0}")]
    TargetTooSmall(usize),

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("regressor distance needs at least two regressors")]
    NeedTwoRegressors,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Broad category used for CLI exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Json(_) => ErrorKind::Config,
            Error::SingularSystem
            | Error::NonFiniteLoss
            | Error::NonFinite(_)
            | Error::NonFiniteInput
            | Error::DivisionByZero(_) => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
