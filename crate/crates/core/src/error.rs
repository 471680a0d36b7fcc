use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// The request is well-formed but outside what the routine will attempt.
    #[error("refused: {0}")]
    Refused(String),

    /// A net failed its coverage test; carries the uncovered witness.
    #[error("coverage failure: target at gauge distance {distance} from every net point")]
    Coverage { distance: f64, witness: Vec<f64> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by bad input rather than the environment.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Refused(_) | Error::Coverage { .. } | Error::Parse { .. }
        )
    }
}
