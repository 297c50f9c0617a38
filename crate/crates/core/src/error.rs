use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{0}: no edges or observations found")]
    EmptyInput(PathBuf),

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("measure `{measure}` is undefined: {reason}")]
    UndefinedMeasure {
        measure: &'static str,
        reason: &'static str,
    },

    #[error("ego `{ego}` yields a degenerate network with {nodes} node(s)")]
    Degenerate { ego: String, nodes: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
