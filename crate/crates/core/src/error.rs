use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("data error at line {line}: {message}")]
    DataLine { line: usize, message: String },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),
    #[error("degenerate neighborhood: {0}")]
    DegenerateNeighborhood(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("model format error: {0}")]
    ModelFormat(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 2 config, 3 data, 4 degenerate training.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidHyperparameter(_) | Error::InvalidArgument(_) => 2,
            Error::Io { .. }
            | Error::Data(_)
            | Error::DataLine { .. }
            | Error::Schema(_)
            | Error::ModelFormat(_) => 3,
            Error::DegenerateTraining(_) | Error::DegenerateNeighborhood(_) => 4,
        }
    }
}
