//! Closed-form bounds, parameter estimators and round-count optimisation.

pub mod bounds;
pub mod estimators;
pub mod optimize;

pub use bounds::{
    false_negative_bound, false_positive_bound, normalized_false_negative_bound,
    normalized_false_positive_bound, BoundInputs, Bounds,
};
pub use estimators::{
    db_to_probability, dephasing_factor, lorentzian_suppression, probability_to_db, spectral_width,
};
pub use optimize::{optimize_rounds, optimize_rounds_over, Objective, OptimalRounds};
