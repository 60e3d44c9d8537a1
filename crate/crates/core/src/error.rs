//! Crate-wide error type.
//!
//! Variants map onto the CLI exit-code contract: parse and precondition
//! failures are input errors (exit 1), database/label validation failures
//! are validation errors (exit 2), and numerical breakdowns (singular
//! systems, degenerate fits) are internal numeric failures (exit 3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data, reported with a 1-based line number.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An operation precondition was not met.
    #[error("{0}")]
    InvalidInput(String),

    /// A constructed object violates its invariants (e.g. overlapping
    /// note bands, duplicate database entries).
    #[error("{0}")]
    Validation(String),

    /// Numerical failure inside an otherwise valid computation.
    #[error("{0}")]
    Numeric(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
