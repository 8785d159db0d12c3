use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter violating a type invariant at construction.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Series that does not converge for the requested arguments.
    #[error("divergent series: {0}")]
    Divergent(String),

    /// Quadrature that failed to reach its tolerance.
    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Work estimate above the configured guard.
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    /// No exact transition sampler exists for the requested process.
    #[error("no exact sampler for {0}")]
    NoExactSampler(String),

    /// A moment target that no distribution of the chosen family can meet.
    #[error("infeasible calibration: {0}")]
    InfeasibleCalibration(String),

    /// Operation not defined for the given family.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
