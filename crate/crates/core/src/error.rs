//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by grid, stencil, statistics, and evolution routines.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller violated a precondition (bad dimensions, empty input,
    /// invalid parameter ranges, guard violations).
    #[error("usage: {0}")]
    Usage(String),

    /// The requested quantity is undefined at the given point, e.g. a
    /// singular operator evaluated where the gradient vanishes.
    #[error("domain: {0}")]
    Domain(String),

    /// A measurement could not be completed; the message names the probe
    /// that failed (e.g. an axis ray with no sign change).
    #[error("diagnostic: {0}")]
    Diagnostic(String),

    /// Non-finite data was encountered where finite values are guaranteed.
    #[error("internal: {0}")]
    Internal(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn diagnostic(msg: impl Into<String>) -> Self {
        Error::Diagnostic(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
