use serde::{Deserialize, Serialize};

use crate::game::GameInstance;
use crate::geometry::{maximin_point, tv_closest_mean, PointCloud};
use crate::Result;

/// Chooses the epoch reference loss `l_hat` and hence `u*_e = u(p*(l_hat), l_hat)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TargetFunction {
    MeanResponse,
    TvMeanResponse { removals: usize },
    MaximinResponse,
    MaximinResponseTrimmed { removals: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetValue {
    pub ell_hat: Vec<f64>,
    pub u_star: Vec<f64>,
    /// Reweighting mass moved (TV variant only).
    pub tv: f64,
}

impl TargetFunction {
    pub fn removals(&self) -> usize {
        match self {
            TargetFunction::TvMeanResponse { removals } | TargetFunction::MaximinResponseTrimmed { removals } => *removals,
            _ => 0,
        }
    }

    pub fn is_maximin(&self) -> bool {
        matches!(self, TargetFunction::MaximinResponse | TargetFunction::MaximinResponseTrimmed { .. })
    }
}

pub fn target_eval(
    target: TargetFunction,
    epoch_losses: &PointCloud<f64>,
    lambda: &[f64],
    instance: &GameInstance,
) -> Result<TargetValue> {
    let (ell_hat, tv) = match target {
        TargetFunction::MeanResponse => (epoch_losses.mean()?, 0.0),
        TargetFunction::TvMeanResponse { removals } => {
            let s = tv_closest_mean(epoch_losses, removals)?;
            (s.mean, s.tv)
        }
        TargetFunction::MaximinResponse => (maximin_point(lambda, epoch_losses, instance, 0)?, 0.0),
        TargetFunction::MaximinResponseTrimmed { removals } => {
            (maximin_point(lambda, epoch_losses, instance, removals)?, 0.0)
        }
    };
    let u_star = instance.ideal_payoff(&ell_hat)?;
    Ok(TargetValue { ell_hat, u_star, tv })
}
