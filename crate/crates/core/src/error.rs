use thiserror::Error;

/// Errors raised while fitting, building moments, estimating or counting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("infeasible margins: {0}")]
    InfeasibleMargins(String),

    #[error("invalid degree sequence: {0}")]
    InvalidDegrees(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("maximum-entropy parameters diverge: {0}")]
    MaxEntBoundary(String),

    #[error("covariance is singular for dimension {0}")]
    SingularCovariance(usize),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("degree sum {0} is odd, no graph exists")]
    OddDegreeSum(u64),

    #[error("state budget exceeded: more than {cap} states")]
    BudgetExceeded { cap: usize },

    #[error("dimension {0} is too large for this operation")]
    DimensionTooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance must have integer margins: {0}")]
    NonIntegerInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
