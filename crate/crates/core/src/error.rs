use thiserror::Error;

/// Errors raised by the distribution functions.
///
/// Element-level problems in a batch (NaN inputs, probabilities out of range,
/// non-integer mass points) are never errors; they surface as NaN or zero
/// values plus a [`Warning`](crate::Warning).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("variance {sigma2} is below the mean {mu}; underdispersed counts cannot be represented")]
    Underdispersed { mu: f64, sigma2: f64 },

    #[error("table index {requested} exceeds the supported maximum {limit}")]
    TableTooLarge { requested: f64, limit: usize },

    #[error("table ends at {xmax} but index {index} was needed")]
    TableTooShort { xmax: usize, index: usize },

    #[error("upper-tail series starting at x = {xstart} did not converge within {iterations} terms")]
    TailNotConverged { xstart: usize, iterations: usize },

    #[error("oracle range exceeded: {0}")]
    OracleRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
