use std::path::PathBuf;

use thiserror::Error;

use crate::gridworld::Position;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("map format error on line {line}: {message}")]
    MapFormat { line: usize, message: String },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("position ({}, {}) is off-map or blocked", .0.x, .0.y)]
    InvalidPosition(Position),

    #[error("input shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("no path from ({}, {}) to the end", .0.x, .0.y)]
    NoPath(Position),

    #[error("planner gave up after {0} samples")]
    SampleBudgetExhausted(usize),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("corpus generation failed: {0}")]
    Corpus(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
