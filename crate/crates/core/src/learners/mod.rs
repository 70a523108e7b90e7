//! Online learners: projected gradient descent, a multi-scale optimistic expert
//! oracle, and covering nets that turn continuous action sets into experts.

mod cover;
mod experts;
mod ogd;

pub use cover::{build_cover, build_cover_with_cap, covering_radius_estimate, lipschitz_discretization_gap, CoveringNet, NET_CAP};
pub use experts::{ExpertOracle, MAX_RATE};
pub use ogd::Ogd;
