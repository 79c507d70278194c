use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by configuration, monitoring and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("event of kind {event} cannot be applied to an output of kind {output}")]
    TypeMismatch {
        event: &'static str,
        output: &'static str,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown scenario id {0:?} (expected one of a..h)")]
    UnknownScenario(String),

    #[error("quantile unreliable: reps * alpha = {product} < 10")]
    UnreliableQuantile { product: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
