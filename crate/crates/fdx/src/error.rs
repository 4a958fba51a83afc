//! Crate-wide error type.
//!
//! Variants are grouped by how the CLI must react: configuration problems map
//! to exit code 2, numeric failures to exit code 3.

use thiserror::Error;

/// Errors produced by the beamforming library and simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix dimensions do not conform for the requested operation.
    #[error("shape mismatch in {op}: {details}")]
    Shape { op: &'static str, details: String },

    /// An input is outside its documented domain (nonpositive power,
    /// out-of-range resolution factor, ...).
    #[error("invalid parameter for {op}: {details}")]
    Parameter { op: &'static str, details: String },

    /// Structurally degenerate input (all-zero gains, zero channel, zero
    /// antenna distance, ...).
    #[error("degenerate input for {op}: {details}")]
    Degenerate { op: &'static str, details: String },

    /// A Gram or covariance matrix required to be invertible is numerically
    /// rank deficient.
    #[error("rank deficiency in {op}: {details}")]
    RankDeficient { op: &'static str, details: String },

    /// An iterative numeric routine failed to converge within its bound.
    #[error("numeric failure in {op}: {details}")]
    Numeric { op: &'static str, details: String },

    /// Beam candidate acquisition ran out of unused (tx, rx) index pairs.
    #[error("candidate acquisition exhausted: {0}")]
    AcquisitionExhausted(String),

    /// Invalid configuration file or CLI option combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// I/O error carrying the path it occurred on.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A per-trial failure annotated with which Monte Carlo trial hit it.
    #[error("trial {index}: {source}")]
    Trial {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Exit code the CLI should use for this error (2 = config, 3 = numeric).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter { .. } | Error::Io { .. } => 2,
            Error::Trial { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    /// Wraps an error with the Monte Carlo trial index that produced it.
    pub fn in_trial(self, index: u64) -> Self {
        Error::Trial {
            index,
            source: Box::new(self),
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
