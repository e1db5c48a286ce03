//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed a value that violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation is not valid in the current state (empty pool,
    /// exhausted budget, ...).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A binary or text input file does not match its declared format.
    /// Names the offending field and the byte offset where parsing failed.
    #[error("{path}: {detail} (field `{field}`, byte offset {offset})")]
    Format {
        path: String,
        field: &'static str,
        detail: String,
        offset: u64,
    },

    /// Experiment configuration problems: unknown keys, missing keys,
    /// unparseable values.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn invalid_state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
