//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Structural problem in an input file (ragged rows, bad sparse index order).
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    /// A token could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A linear solve or factorization failed even after jitter escalation.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Bernoulli selection produced no landmarks.
    #[error("empty sample: {0}")]
    EmptySample(String),

    /// Leverage scores or kernel mass degenerate to zero.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code for the CLI: 2 usage, 3 numerical, 4 reserved for
    /// verification failures (raised by the verify command itself).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::EmptySample(_) | Error::Degenerate(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
