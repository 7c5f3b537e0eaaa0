use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column \"{column}\": cannot parse {value:?} as a number")]
    ParseCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column \"{column}\": value is not finite")]
    NonFinite { row: usize, column: String },

    #[error("duplicate column name \"{0}\"")]
    DuplicateColumn(String),

    #[error("label column \"{0}\" not found")]
    LabelColumnNotFound(String),

    #[error("row {row}: label value {value} is not 0 or 1")]
    InvalidLabel { row: usize, value: String },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("all RECols were dropped by the R² filter in recol-only mode")]
    AllRecolsDropped,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad user input (flags, configs, parameters)
    /// as opposed to failures while processing data.
    pub fn is_usage_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Config { .. } | Error::LabelColumnNotFound(_)
        )
    }
}
