use serde::Serialize;

use crate::game::ActionSet;
use crate::vector::{axpy, norm};
use crate::{Error, Result};

/// Projected online gradient descent with step `eta_t = D / (G sqrt t)`.
#[derive(Debug, Clone, Serialize)]
pub struct Ogd {
    #[serde(skip)]
    set: ActionSet,
    current: Vec<f64>,
    gradient_bound: f64,
    diameter: f64,
    round: usize,
}

impl Ogd {
    pub fn new(set: ActionSet, start: Vec<f64>, gradient_bound: f64, diameter: f64) -> Result<Self> {
        if start.len() != set.dim() {
            return Err(Error::DimensionMismatch { expected: set.dim(), got: start.len() });
        }
        let current = set.project(&start);
        Ok(Self { set, current, gradient_bound, diameter, round: 0 })
    }

    /// Starts at the centre of the set with `D` its diameter.
    pub fn centered(set: ActionSet, gradient_bound: f64) -> Self {
        let start = set.center();
        let diameter = set.diameter();
        Self { current: start, set, gradient_bound, diameter, round: 0 }
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn step_size(&self, t: usize) -> f64 {
        self.diameter / (self.gradient_bound * (t.max(1) as f64).sqrt())
    }

    /// Feeds the gradient of the current round's loss and returns the next action.
    pub fn step(&mut self, gradient: &[f64]) -> Result<&[f64]> {
        if gradient.len() != self.current.len() {
            return Err(Error::DimensionMismatch { expected: self.current.len(), got: gradient.len() });
        }
        let g = norm(gradient);
        if g > self.gradient_bound + 1e-9 {
            return Err(Error::GradientBoundExceeded { norm: g, bound: self.gradient_bound });
        }
        self.round += 1;
        let eta = self.step_size(self.round);
        let mut next = self.current.clone();
        axpy(&mut next, -eta, gradient);
        self.current = if self.set.contains(&next, 0.0) { next } else { self.set.project(&next) };
        Ok(&self.current)
    }
}
