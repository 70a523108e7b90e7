//! Fast-rate learners for scalar payoffs and planar adversary sets.

mod one_dim;
mod two_dim;

pub use one_dim::{run_one_dim, OneDimReport};
pub use two_dim::{approach_direction, base_approachability_step, run_two_dim, target_model, PayoffModel, TwoDimReport};
