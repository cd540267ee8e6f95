use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error("final parity measurement is only defined for approach A")]
    NotApproachA,

    #[error("no candidate round count satisfies the objective ({0})")]
    Infeasible(String),

    #[error("relay chain must contain at least one hop")]
    EmptyChain,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
