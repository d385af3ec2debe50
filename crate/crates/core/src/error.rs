use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("problem too large for brute force: {num_vars} variables (limit {limit})")]
    TooLarge { num_vars: usize, limit: usize },

    #[error("invalid defect: {0}")]
    InvalidDefect(String),

    #[error("clique construction requires a defect-free graph; use the heuristic embedder")]
    DefectiveGraph,

    #[error("invalid embedding: {0}")]
    Embedding(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("solver did not converge after {iterations} iterations (objective {objective})")]
    NotConverged { iterations: usize, objective: f64 },

    #[error("oracle failed during {context}: {source}")]
    Oracle {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("resample {index} failed: {source}")]
    Resample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
