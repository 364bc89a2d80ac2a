use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input contains a NaN key at position {0}")]
    NanKey(usize),

    #[error("degenerate key range: x_min == x_max ({0})")]
    DegenerateRange(f64),

    #[error("key {key} lies outside the range [{min}, {max}]")]
    OutOfRange { key: f64, min: f64, max: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: malformed key file at byte offset {offset}: {reason}")]
    Format {
        path: PathBuf,
        offset: u64,
        reason: String,
    },

    #[error("column {column} out of range (rows have {width} columns)")]
    ColumnOutOfRange { column: usize, width: usize },

    #[error("cannot draw {requested} keys from a source of {available}")]
    SubsampleTooLarge { requested: usize, available: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
