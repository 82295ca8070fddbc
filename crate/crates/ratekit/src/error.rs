use thiserror::Error;

/// Errors produced by rate computations and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    /// A scalar argument is outside its documented domain.
    #[error("invalid parameter {name} = {value}: requires {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The requested configuration cannot be realized on this network size.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    /// Exhaustive enumeration or dense linear algebra refused above a size limit.
    #[error("size {m} exceeds limit {limit} for {operation}")]
    TooLarge {
        m: usize,
        limit: usize,
        operation: &'static str,
    },

    /// An iterative solver exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (last value {last})")]
    NoConvergence { iterations: usize, last: f64 },

    /// Rejection sampling gave up.
    #[error("rejection sampling exceeded {attempts} attempts")]
    RejectionExceeded { attempts: usize },
}

pub type Result<T> = std::result::Result<T, RateError>;

pub(crate) fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(RateError::InvalidParameter {
            name,
            value,
            requirement,
        })
    }
}
