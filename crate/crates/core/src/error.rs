use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("sample {index} is not finite or violates n >= 0, T > 0")]
    InvalidSample { index: usize },

    #[error("sample {index} at {position:?} lies outside the grid bounds")]
    SampleOutOfBounds { index: usize, position: [f64; 3] },

    #[error("non-finite molecule state after {collisions} collisions at t = {time} s: r = {position:?}, v = {velocity:?}")]
    NonFiniteState {
        collisions: u64,
        time: f64,
        position: [f64; 3],
        velocity: [f64; 3],
    },

    #[error("only {accepted} of {target} trajectories accepted after {attempts} attempts")]
    AttemptBudgetExhausted {
        accepted: usize,
        target: usize,
        attempts: u64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
