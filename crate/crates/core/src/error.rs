use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading, validating, training or evaluating.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {path}: {message}")]
    Record {
        line: usize,
        path: String,
        message: String,
    },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("document {doc_id}: {}", violations.join("; "))]
    Invalid {
        doc_id: String,
        violations: Vec<String>,
    },

    #[error("annotation {index} ({doc_id}): {message}")]
    Annotation {
        index: usize,
        doc_id: String,
        message: String,
    },

    #[error("empty training set: {0}")]
    EmptyTraining(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    /// True for errors caused by bad input data rather than IO or internal faults.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Stream(_))
    }
}
