//! Error type shared across the crate.
//!
//! Variants map onto the CLI exit-code contract: config = 2, data = 3,
//! numeric = 4, io = 5.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension mismatch between operands; names both shapes.
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    /// Invalid configuration value (bad hyperparameter, malformed config file).
    #[error("config error: {0}")]
    Config(String),

    /// Bad or insufficient data (missing column, unparseable cell, class too small).
    #[error("data error: {0}")]
    Data(String),

    /// Numeric failure: NaN/Inf, log-domain violation, checksum of numeric payload.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Operation applied in the wrong state (e.g. normalizing twice).
    #[error("state error: {0}")]
    State(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Model bundle could not be loaded.
    #[error("bundle error: {0}")]
    Bundle(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Data(format!("csv: {e}"))
    }
}

impl Error {
    pub fn shape(expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Error::Shape {
            expected: expected.into(),
            actual: actual.into(),
        }
    }

    /// Process exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Shape { .. } | Error::State(_) => 3,
            Error::Numeric(_) | Error::Bundle(_) => 4,
            Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
