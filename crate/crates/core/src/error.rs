use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A structural problem in an input file, with the 1-based offending line.
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: no usable rows")]
    EmptyCorpus { path: PathBuf },

    #[error("label {label:?} has {count} documents, fewer than k = {k}")]
    LabelTooSmall { label: String, count: usize, k: usize },

    #[error("external normalizer `{command}` failed on token {token:?}: {message}")]
    External {
        command: String,
        token: String,
        message: String,
    },

    #[error("normalizer produced an empty vocabulary from {before} distinct tokens")]
    DegenerateNormalizer { before: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("document sets do not line up: {0}")]
    Misaligned(String),

    #[error("embedding service: {0}")]
    Service(String),

    #[error("training requires at least 2 classes, got {0}")]
    SingleClass(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
