//! Opportunistic Blackwell approachability.
//!
//! The crate is organised bottom-up:
//!
//! - [`game`]: action sets, bi-affine payoffs, response functions and instance files.
//! - [`geometry`]: hull distances, support functions, halfspace depth, trimmed
//!   intersection regions, offset maxima, maximin targets and the incremental 2-D hull.
//! - [`learners`]: projected online gradient descent, a multi-scale optimistic expert
//!   oracle and covering nets.
//! - [`framework`]: the epoch-based two-learner approachability algorithm with its
//!   loss rules, target functions and presets.
//! - [`lowdim`]: the reset-based learner for scalar payoffs and the hull-projection
//!   learner for planar adversary sets.
//! - [`adversaries`]: loss-sequence generators with known ground truth.
//! - [`harness`]: experiment matrices, metrics, rate fits and CSV/JSON output.
//!
//! Geometric kernels are generic over the floating-point type (see [`Scalar`]); the
//! aliases below fix them to `f64`, which is what the learners and harness use.

pub mod adversaries;
pub mod error;
pub mod framework;
pub mod game;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod learners;
pub mod lowdim;
pub mod lp;
pub mod scalar;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// A finite point set in `f64`.
pub type PointCloud = geometry::PointCloud<f64>;
/// A finite point set in `f32`.
pub type PointCloudF32 = geometry::PointCloud<f32>;
/// Incrementally maintained planar hull in `f64`.
pub type Hull2D = geometry::Hull2D<f64>;
/// Incrementally maintained planar hull in `f32`.
pub type Hull2DF32 = geometry::Hull2D<f32>;
/// Convex-combination weights in `f64`.
pub type WeightVector = geometry::WeightVector<f64>;
/// Running mean of payoff vectors in `f64`.
pub type RunningAverage = game::RunningAverage<f64>;
/// Tolerance bundle in `f64`.
pub type Tolerances = geometry::Tolerances<f64>;
