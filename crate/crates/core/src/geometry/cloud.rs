use serde::{Deserialize, Serialize};

use crate::vector::dot;
use crate::{Error, Result, Scalar};

/// A finite set of equally sized points, optionally tagged with round indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud<T: Scalar> {
    points: Vec<Vec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rounds: Option<Vec<usize>>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(points: Vec<Vec<T>>) -> Result<Self> {
        if let Some(first) = points.first() {
            let k = first.len();
            if let Some(p) = points.iter().find(|p| p.len() != k) {
                return Err(Error::DimensionMismatch { expected: k, got: p.len() });
            }
        }
        Ok(Self { points, rounds: None })
    }

    pub fn with_rounds(points: Vec<Vec<T>>, rounds: Vec<usize>) -> Result<Self> {
        if rounds.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: rounds.len() });
        }
        let mut c = Self::new(points)?;
        c.rounds = Some(rounds);
        Ok(c)
    }

    /// Builds a cloud from scalars (one-dimensional points).
    pub fn from_scalars(values: &[T]) -> Self {
        Self {
            points: values.iter().map(|&v| vec![v]).collect(),
            rounds: None,
        }
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn rounds(&self) -> Option<&[usize]> {
        self.rounds.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point dimension, 0 for an empty cloud.
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn push(&mut self, p: Vec<T>) -> Result<()> {
        if !self.points.is_empty() && p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        if let Some(r) = self.rounds.as_mut() {
            r.push(r.last().map_or(0, |x| x + 1));
        }
        self.points.push(p);
        Ok(())
    }

    pub fn mean(&self) -> Result<Vec<T>> {
        crate::vector::mean(&self.points).ok_or(Error::EmptyCloud)
    }

    pub(crate) fn require(&self, dim: usize) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        Ok(())
    }

    /// Largest Euclidean norm among the points.
    pub fn radius(&self) -> T {
        self.points
            .iter()
            .map(|p| crate::vector::norm(p))
            .fold(T::zero(), T::max)
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector<T: Scalar> {
    weights: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        let tol = T::c(1e-9).max(T::default_eps());
        let sum: T = weights.iter().copied().sum();
        if weights.is_empty() || (sum - T::one()).abs() > tol || weights.iter().any(|&w| w < -tol) {
            return Err(Error::MembershipViolation {
                what: "weight simplex",
                excess: (sum - T::one()).abs().to_f64_lossy(),
            });
        }
        Ok(Self { weights })
    }

    pub(crate) fn from_raw(weights: Vec<T>) -> Self {
        Self { weights }
    }

    pub fn uniform(n: usize) -> Self {
        let w = T::one() / T::from_usize(n.max(1)).unwrap();
        Self { weights: vec![w; n] }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<T> {
        self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// L1 distance to the uniform weights.
    pub fn tv_from_uniform(&self) -> T {
        let u = T::one() / T::from_usize(self.weights.len().max(1)).unwrap();
        self.weights.iter().map(|&w| (w - u).abs()).sum()
    }

    /// `sum_i w_i p_i` over the cloud's points.
    pub fn apply(&self, cloud: &PointCloud<T>) -> Vec<T> {
        crate::vector::combine(cloud.points(), &self.weights)
    }
}

/// Numerical tolerances of the geometric kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T: Scalar> {
    /// Set-membership slack.
    pub membership: T,
    /// Duality-gap bound on the distance returned by the min-norm-point solver.
    pub hull_gap: T,
    pub hull_max_iter: usize,
    /// Slack in the halfspace-depth count `<lambda, p - x> > -depth_eps`.
    pub depth_eps: T,
    /// Directions used by sampled depth and support-based distances.
    pub sample_directions: usize,
    /// Optimality gap of TV-closest means.
    pub tv_gap: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::default_eps();
        Self {
            membership: T::c(1e-9).max(eps),
            hull_gap: T::c(1e-8).max(eps),
            hull_max_iter: 10_000,
            depth_eps: T::c(1e-12).max(eps),
            sample_directions: 100_000,
            tv_gap: T::c(1e-4),
        }
    }
}

/// `max_i <p_i, lambda>`.
pub fn support<T: Scalar>(cloud: &PointCloud<T>, lambda: &[T]) -> Result<T> {
    cloud.require(lambda.len())?;
    Ok(cloud
        .points()
        .iter()
        .map(|p| dot(p, lambda))
        .fold(T::neg_infinity(), T::max))
}
