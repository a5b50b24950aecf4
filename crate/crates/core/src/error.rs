use thiserror::Error;

use crate::microsim::SimError;
use crate::neural::NeuralError;
use crate::netgen::NetgenError;
use crate::rowenv::EnvError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Netgen(#[from] NetgenError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by bad input (config, flags) rather than a
    /// failure while running.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Usage(_) | Error::Netgen(NetgenError::Invalid(_))
        )
    }
}
