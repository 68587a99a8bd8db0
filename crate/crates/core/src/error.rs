//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by all modules.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Graph construction with a degenerate size parameter.
    #[error("invalid size: {0}")]
    InvalidSize(String),

    /// Argument outside the operation's documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No edge subset connects the two sets (disconnected graph).
    #[error("distance undefined: no connecting edge set exists")]
    DistanceUndefined,

    /// Requested work exceeds a configured enumeration budget.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Matrix deviates from Hermiticity beyond the accepted tolerance.
    #[error("not hermitian: relative deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// A local term is not supported on its declared edge.
    #[error("invalid term: {0}")]
    InvalidTerm(String),

    /// Model construction requested on an unsupported graph.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// Fermionic term is not an even polynomial in the mode operators.
    #[error("parity violation: term is not an even polynomial")]
    ParityViolation,

    /// Bound evaluated outside its regime of validity (e.g. |beta| >= beta*).
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// Bound is only asserted from a minimum distance onward.
    #[error("bound inapplicable: dist {dist} is below the minimum distance {l_zero:.6}")]
    BoundInapplicable { dist: f64, l_zero: f64 },

    /// Correlation length diverges at the critical temperature.
    #[error("divergent correlation length: |beta| is at the critical point")]
    DivergentLength,

    /// Configuration file could not be parsed or is missing keys.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem or serialization failure in the experiment runner.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
