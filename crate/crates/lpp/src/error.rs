//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by window construction, detection, and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is outside its legal range (bad probability,
    /// non-increasing table knots, non-positive rate, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument violates a documented domain restriction at call time
    /// (e.g. a uniform variate outside the open interval (0, 1)).
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for this distribution or model.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A deliberately small-scale reference implementation was asked to run
    /// beyond its guard limit.
    #[error("{what} is limited to {limit}, got {got}")]
    Guard {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    /// Not enough data to estimate the requested quantity.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A moment-condition gate refused to run an experiment whose limit law
    /// does not apply to the configured distribution.
    #[error("gate refused: {0}")]
    GateRefused(String),

    /// Underlying I/O failure (table files, instance files).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON instance or report.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed textual input (spec strings, grids, CSV tables).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
