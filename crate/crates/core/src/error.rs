use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two inputs disagree on length, dimension count or shape.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A coordinate falls outside the valid range.
    #[error("{coordinate} out of bounds: {value} (limit {limit})")]
    Bounds {
        coordinate: &'static str,
        value: usize,
        limit: usize,
    },

    /// A value violates a type invariant (e.g. a non-finite sample).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Malformed dataset file.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("stratification failed: {0}")]
    Stratification(String),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A time or candidate budget produced no usable result.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
