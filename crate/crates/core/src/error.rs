use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("trail document line {line}: {message}")]
    TrailParse { line: usize, message: String },

    #[error("trail cell ({x}, {y}) on line {line} lies outside the {width}x{height} grid")]
    TrailBounds {
        line: usize,
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },

    #[error("trail cell ({x}, {y}) on line {line} duplicates an earlier cell")]
    TrailDuplicate { line: usize, x: usize, y: usize },

    #[error("expected {expected} bits, got {actual}")]
    Size { expected: usize, actual: usize },

    #[error("invalid genome hex: {0}")]
    Hex(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("census for generation {got} does not follow generation {last}")]
    Ordering { last: u64, got: u64 },

    #[error("run summaries disagree on generation count ({expected} vs {actual})")]
    Shape { expected: usize, actual: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
