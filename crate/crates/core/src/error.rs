use thiserror::Error;

/// Crate-wide error type. Variants map 1:1 onto the CLI exit codes and the
/// C ABI status codes, so new variants need a code assignment in both places.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched lengths between grids, fields, or tables.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A computation produced NaN/Inf or an otherwise unusable value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration. Collects every offending key, not just the first.
    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    /// A stability bound (e.g. CFL) was violated.
    #[error("stability violated: {0}")]
    Stability(String),

    /// State too degenerate to analyze (e.g. density vanishes everywhere).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// Problem size exceeds a hard enumeration limit.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }
}

pub type Result<T> = std::result::Result<T, Error>;
