use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected width {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("instance too large: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("solver protocol error: {0}")]
    Protocol(String),

    /// A solver reported a witness that does not satisfy the instance it was given.
    #[error("witness integrity check failed: {0}")]
    Integrity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Some trials came back unknown, so no certificate can be issued.
    #[error("inconclusive: {unknown} of {trials} trials returned unknown")]
    Inconclusive { unknown: usize, trials: usize },

    #[error("io error on {path:?}: {source}")]
    Io {
        path: Option<PathBuf>,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io { path: None, source }
    }
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io_at(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: Some(path.into()),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
