use thiserror::Error;

/// Errors raised by the exact and numerical kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("point (x={x}, level={level}) lies outside the domain")]
    OutOfDomain { x: usize, level: usize },

    #[error("empty path set: the endpoints do not form an endpoint pair")]
    EmptyPathSet,

    #[error("instance too large for oracle: {count} candidate multipaths exceed the bound {bound}")]
    OracleTooLarge { count: u128, bound: u128 },

    #[error("dimension guard: integral of dimension {dim} exceeds the limit {max}")]
    DimensionGuard { dim: usize, max: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
