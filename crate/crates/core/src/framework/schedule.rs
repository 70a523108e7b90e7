use serde::{Deserialize, Serialize};

use super::{LossRule, TargetFunction};
use crate::{Error, Result};

/// `epochs` equal blocks of `horizon / epochs` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochSchedule {
    pub horizon: usize,
    pub epochs: usize,
}

impl EpochSchedule {
    pub fn new(horizon: usize, epochs: usize) -> Result<Self> {
        if epochs == 0 || horizon == 0 || !horizon.is_multiple_of(epochs) {
            return Err(Error::ScheduleMismatch { horizon, epochs });
        }
        Ok(EpochSchedule { horizon, epochs })
    }

    /// Schedule with the divisor of `horizon` closest to `target`.
    pub fn rounded(horizon: usize, target: f64) -> Result<Self> {
        Self::new(horizon, nearest_divisor(horizon, target))
    }

    pub fn epoch_len(&self) -> usize {
        self.horizon / self.epochs
    }

    pub fn epoch_of(&self, t: usize) -> usize {
        t / self.epoch_len()
    }

    pub fn rounds(&self, e: usize) -> std::ops::Range<usize> {
        let n = self.epoch_len();
        e * n..(e + 1) * n
    }
}

/// Closest divisor of `n` to `target`, preferring those within 25% of it; ties go
/// to the smaller divisor.
pub fn nearest_divisor(n: usize, target: f64) -> usize {
    let target = target.clamp(1.0, n as f64);
    let divisors: Vec<usize> = (1..=n).filter(|k| n.is_multiple_of(*k)).collect();
    let closest = |ds: &mut dyn Iterator<Item = usize>| {
        ds.min_by(|a, b| {
            let da = (*a as f64 - target).abs();
            let db = (*b as f64 - target).abs();
            da.total_cmp(&db).then(a.cmp(b))
        })
    };
    let mut near = divisors
        .iter()
        .copied()
        .filter(|&k| (k as f64) >= 0.75 * target && (k as f64) <= 1.25 * target);
    closest(&mut near).or_else(|| closest(&mut divisors.iter().copied())).unwrap_or(1)
}

/// Inner online learner of an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InnerKind {
    /// Projected gradient descent on `P`.
    Ogd,
    /// Experts over a covering net of `P`; `resolution = None` means `1 / (d_P T_e)`.
    Experts {
        #[serde(default)]
        resolution: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    StrictEff,
    StoEff,
    StrictFast,
    StoFast,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::StrictEff, Preset::StoEff, Preset::StrictFast, Preset::StoFast];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::StrictEff => "strict_eff",
            Preset::StoEff => "sto_eff",
            Preset::StrictFast => "strict_fast",
            Preset::StoFast => "sto_fast",
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Preset::StrictEff | Preset::StrictFast)
    }

    pub fn is_fast(&self) -> bool {
        matches!(self, Preset::StrictFast | Preset::StoFast)
    }

    /// Real-valued epoch count before rounding.
    pub fn epoch_target(&self, horizon: usize, d_p: usize, epsilon: f64) -> f64 {
        let t = horizon as f64;
        let dp = d_p as f64;
        let contamination = if epsilon > 0.0 { (epsilon * dp).powf(-2.0 / 3.0) } else { f64::INFINITY };
        match self {
            Preset::StrictEff => t.sqrt() / dp,
            Preset::StoEff => (t.sqrt() / dp).min(contamination),
            Preset::StrictFast => (t / dp).powf(2.0 / 3.0),
            Preset::StoFast => (t / dp).powf(2.0 / 3.0).min(contamination),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// A fully specified learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub schedule: EpochSchedule,
    pub rule: LossRule,
    pub target: TargetFunction,
    pub inner: InnerKind,
}

impl LearnerConfig {
    pub fn check(&self) -> Result<()> {
        EpochSchedule::new(self.schedule.horizon, self.schedule.epochs)?;
        if let LossRule::OffsetMax { removals } = self.rule {
            if removals >= self.schedule.epoch_len() {
                return Err(Error::Config(format!(
                    "offset budget {removals} is not below the epoch length {}",
                    self.schedule.epoch_len()
                )));
            }
        }
        if !self.rule.is_linear() && self.inner == InnerKind::Ogd {
            return Err(Error::Config("non-linear loss rules need the expert inner learner".into()));
        }
        Ok(())
    }
}

/// Configuration for a named preset. `epsilon` is the contamination level the
/// statistical presets are tuned for (ignored by strict ones).
pub fn preset(name: &str, horizon: usize, d_p: usize, epsilon: f64) -> Result<LearnerConfig> {
    let p: Preset = name.parse()?;
    preset_config(p, horizon, d_p, epsilon)
}

pub fn preset_config(p: Preset, horizon: usize, d_p: usize, epsilon: f64) -> Result<LearnerConfig> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Config(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let schedule = EpochSchedule::rounded(horizon, p.epoch_target(horizon, d_p, epsilon))?;
    let eps_t = (epsilon * horizon as f64).floor() as usize;
    let eps_dt = (epsilon * d_p as f64 * horizon as f64).floor() as usize;
    let (rule, target, inner) = match p {
        Preset::StrictEff => (LossRule::Linear, TargetFunction::MeanResponse, InnerKind::Ogd),
        Preset::StoEff => (LossRule::Linear, TargetFunction::TvMeanResponse { removals: eps_t }, InnerKind::Ogd),
        Preset::StrictFast => (LossRule::RunningMax, TargetFunction::MaximinResponse, InnerKind::Experts { resolution: None }),
        Preset::StoFast => {
            let rule = if eps_dt == 0 { LossRule::RunningMax } else { LossRule::OffsetMax { removals: eps_dt } };
            let target = if eps_t == 0 {
                TargetFunction::MaximinResponse
            } else {
                TargetFunction::MaximinResponseTrimmed { removals: eps_t }
            };
            (rule, target, InnerKind::Experts { resolution: None })
        }
    };
    let cfg = LearnerConfig { schedule, rule, target, inner };
    cfg.check()?;
    Ok(cfg)
}
