//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by scenario generation, the solvers, and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Pathloss is only defined for strictly positive distances.
    #[error("distance must be positive, got {0} km")]
    NonPositiveDistance(f64),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Per-user rate is undefined when the serving BS carries no load.
    #[error("rate undefined for a base station with zero load")]
    ZeroLoad,

    /// The double-log utility weight is undefined at zero SINR.
    #[error("SINR is zero for user {user} towards BS {bs}; utility weight ln(W ln(1+SINR)) undefined")]
    ZeroSinr { user: usize, bs: usize },

    /// Argument to the inverse of the f-kernel lies outside its range (0, 1).
    #[error("f_inverse argument {0} outside the open interval (0, 1)")]
    FInverseDomain(f64),

    /// A brute-force oracle was asked to enumerate more states than its guard allows.
    #[error("oracle instance too large: {0}")]
    OracleTooLarge(String),

    /// An aggregation step received no rows.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error("scenario serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
