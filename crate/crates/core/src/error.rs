use crate::series::Basis;
use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("basis mismatch: expected {expected:?}, found {found:?}")]
    BasisMismatch { expected: Basis, found: Basis },

    #[error("interval mismatch: ({0}, {1}) vs ({2}, {3})")]
    IntervalMismatch(f64, f64, f64, f64),

    #[error("invalid interval: lower bound {0} must be strictly below upper bound {1}")]
    InvalidInterval(f64, f64),

    #[error("non-finite sample value {value} at node x = {node}")]
    NonFiniteSample { node: f64, value: f64 },

    #[error("resolvent shift must be positive, got {0}")]
    NonPositiveShift(f64),

    #[error("tensor order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("tensor capacity exceeded: order {order}, index sum {index_sum} (caps: order <= {max_order}, sum <= {max_index_sum})")]
    TensorCapacity {
        order: usize,
        index_sum: u32,
        max_order: usize,
        max_index_sum: u32,
    },

    #[error("support solver failed after {iterations} iterations, residuals ({r_mean:.3e}, {r_moment:.3e})")]
    SupportSolver {
        iterations: usize,
        r_mean: f64,
        r_moment: f64,
    },

    #[error("candidate support ({a}, {b}) leaves the declared domain")]
    DomainViolation { a: f64, b: f64 },

    #[error("potential is not convex: V''({at}) = {value}")]
    NotConvex { at: f64, value: f64 },

    #[error("equilibrium weight reaches {min:.3e} at u = {at}: non-convex potential or wrong support")]
    NegativeDensity { min: f64, at: f64 },

    #[error("stiffness matrix of dimension {dim} is not positive definite")]
    NotPositiveDefinite { dim: usize },

    #[error("divergent integrand: V'' vanishes at u = {at} faster than phi'^2")]
    DivergentIntegrand { at: f64 },

    #[error("eigensolver failed on a matrix of size {0}")]
    Eigensolver(usize),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
