use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    /// A density was evaluated at a point where it diverges.
    #[error("singular density: {0}")]
    Singularity(String),
    /// A covariance matrix failed positive semi-definiteness.
    #[error("covariance error: {0}")]
    Covariance(String),
    /// An oracle computation exceeded its cost budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// Invalid configuration value or flag combination.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Series truncation error above the requested accuracy.
    #[error("truncation error too large: {0}")]
    Truncation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
