use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::game::GameInstance;
use crate::geometry::offmax;
use crate::vector::dot;
use crate::{Error, Result};

/// How the per-round epoch loss `f_t(p)` is built from projected payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LossRule {
    /// `<lambda, u(p, l_t)>`.
    Linear,
    /// Running maximum over the epoch so far.
    RunningMax,
    /// `max(offmax^removals over the epoch so far, current value)`.
    OffsetMax { removals: usize },
}

impl LossRule {
    /// Whether the epoch loss is affine in `p` (so OGD applies).
    pub fn is_linear(&self) -> bool {
        matches!(self, LossRule::Linear)
    }

    /// Applies the rule to the projected payoffs `<lambda, u(p, l_s)>` of the epoch so
    /// far; the last entry is the current round.
    pub fn apply(&self, values: &[f64]) -> Result<f64> {
        let current = *values.last().ok_or(Error::EmptyHistory)?;
        Ok(match self {
            LossRule::Linear => current,
            LossRule::RunningMax => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            LossRule::OffsetMax { removals } => offmax(values, *removals).max(current),
        })
    }

    pub fn tracker(&self) -> RuleTracker {
        RuleTracker::new(*self)
    }
}

/// `f_t(p)` for the epoch history `history` (current loss last).
pub fn loss_eval(rule: LossRule, history: &[Vec<f64>], lambda: &[f64], p: &[f64], instance: &GameInstance) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let values: Vec<f64> = history
        .iter()
        .map(|l| dot(lambda, &instance.payoff_unchecked(p, l)))
        .collect();
    rule.apply(&values)
}

/// Incremental evaluation of a rule for one fixed action.
#[derive(Debug, Clone)]
pub struct RuleTracker {
    rule: LossRule,
    max: f64,
    // min-heap holding the largest `removals + 1` values
    top: BinaryHeap<Reverse<OrdF64>>,
    seen: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl RuleTracker {
    pub fn new(rule: LossRule) -> Self {
        RuleTracker { rule, max: f64::NEG_INFINITY, top: BinaryHeap::new(), seen: 0 }
    }

    pub fn reset(&mut self) {
        self.max = f64::NEG_INFINITY;
        self.top.clear();
        self.seen = 0;
    }

    /// Records the current projected payoff and returns `f_t`.
    pub fn push(&mut self, v: f64) -> f64 {
        self.seen += 1;
        match self.rule {
            LossRule::Linear => v,
            LossRule::RunningMax => {
                self.max = self.max.max(v);
                self.max
            }
            LossRule::OffsetMax { removals } => {
                self.top.push(Reverse(OrdF64(v)));
                if self.top.len() > removals + 1 {
                    self.top.pop();
                }
                let off = if self.seen > removals { self.top.peek().unwrap().0 .0 } else { 0.0 };
                off.max(v)
            }
        }
    }
}
