use thiserror::Error;

/// Errors produced by the rate model, the config loader and the Monte Carlo oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid {field} = {value}: {reason}")]
    Invariant {
        field: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("half-link success probability is zero; no attempt can ever succeed")]
    ZeroSuccessProbability,

    #[error("repeaterless bound is unbounded at eta = 1")]
    UnboundedCapacity,

    #[error("simulation exceeded the step budget of {budget} steps")]
    BudgetExceeded { budget: u64 },

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),

    #[error("distance grid must be strictly increasing and non-negative")]
    InvalidGrid,

    #[error("unknown platform `{0}`")]
    UnknownPlatform(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant(field: &'static str, value: impl ToString, reason: &'static str) -> Error {
    Error::Invariant {
        field,
        value: value.to_string(),
        reason,
    }
}
