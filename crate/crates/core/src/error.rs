use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by code construction, channel setup, decoding and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code dimensions: n = {n}, k = {k}")]
    InvalidDimensions { n: usize, k: usize },

    #[error("CRC polynomial {poly:#x} has degree {degree}, expected {expected}")]
    PolynomialDegree {
        poly: u64,
        degree: u32,
        expected: usize,
    },

    #[error("CRC polynomial {0:#x} must have nonzero constant and leading terms")]
    ImproperPolynomial(u64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid channel parameter: {0}")]
    InvalidChannel(String),

    #[error("block size {b} does not divide {n_s} symbols")]
    BlockSize { b: usize, n_s: usize },

    #[error("block of {b} symbols has {count} candidates, above the limit of {limit}")]
    TooManyCandidates {
        b: usize,
        count: usize,
        limit: usize,
    },

    #[error("reliability weight {value} at index {index} is not a nonnegative number")]
    InvalidWeight { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
