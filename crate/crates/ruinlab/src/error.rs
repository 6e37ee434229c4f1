use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Utility diverges to -inf at the requested point (e.g. log at 0).
    #[error("divergent utility: {0}")]
    Divergence(String),

    /// A stated precondition between arguments is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// The bound or construction does not apply to these parameters.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// Horizon below the validity threshold of the ruin bound.
    #[error("horizon {t} does not exceed the threshold {t_min}")]
    BelowThreshold { t: f64, t_min: f64 },

    /// Malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Value iteration stopped before reaching the tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
