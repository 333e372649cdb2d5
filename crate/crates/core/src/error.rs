use std::path::PathBuf;

/// Errors raised by dataset construction, clustering and scoring.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two objects that must share a dimension (feature count, point count) do not.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("empty input: {0}")]
    EmptyInput(String),
    /// Invalid configuration value; the message names the offending field.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The requested quantity is not defined for the given input (e.g. Rand index with m < 2).
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("parse error in {path} at row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Too many perturbed refits failed inside a stability analysis.
    #[error("{failed} of {total} perturbed fits failed: {last}")]
    PerturbationFailures {
        failed: usize,
        total: usize,
        last: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
