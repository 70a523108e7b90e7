//! Convex-geometric kernels over finite point clouds.

mod cloud;
mod depth;
mod hull;
mod hull2d;
mod maximin;
mod offmax;
mod region;
mod tv;

pub use cloud::{support, PointCloud, Tolerances, WeightVector};
pub use depth::{halfspace_depth, halfspace_depth_sampled, q_int_membership};
pub use hull::{dist_to_hull, dist_to_hull_with, dist_via_support, project_to_hull};
pub use hull2d::{convex_hull_2d, polygon_area, polygon_perimeter, Hull2D};
pub use maximin::{maximin_generators, maximin_point, maximin_value, minimax_action, AffinePiece};
pub use offmax::{offmax, offmax_subset_monotonicity_check};
pub use region::{trimmed_region, TrimmedRegion};
pub use tv::{tv_closest_mean, TvSolution};
