use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid order statistic ({i}, {n}): need 1 <= i <= n")]
    InvalidSpec { i: u32, n: u32 },

    #[error("invalid harmonic range [{lo}, {hi}]: need 1 <= lo <= hi")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("shape class {class} is not supported by {operation}")]
    UnsupportedClass {
        class: &'static str,
        operation: &'static str,
    },

    #[error("boundary case: {0}")]
    BoundaryCase(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("empty data")]
    EmptyData,

    #[error("infeasible class pair: lower bound {lo} from {lower} exceeds upper bound {hi} from {upper}")]
    Infeasible {
        lower: &'static str,
        upper: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
