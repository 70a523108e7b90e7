use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversaries::AdversarySpec;
use crate::framework::{preset, EpochSchedule, InnerKind, LearnerConfig, LossRule, TargetFunction};
use crate::game::{GameInstance, InstanceFile};
use crate::geometry::Tolerances;
use crate::instances;
use crate::{Error, Result};

/// Where the game comes from: a built-in name, a JSON file, or an inline definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceRef {
    Builtin(String),
    File { path: PathBuf },
    Inline(Box<InstanceFile>),
}

impl InstanceRef {
    /// Relative file paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> Result<GameInstance> {
        match self {
            InstanceRef::Builtin(name) => instances::builtin(name),
            InstanceRef::File { path } => {
                let full = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                GameInstance::from_json(&std::fs::read_to_string(full)?)
            }
            InstanceRef::Inline(file) => GameInstance::from_file((**file).clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    /// A named tuning of the epoch learner.
    Preset { name: String },
    /// Epoch learner with explicit parts; `epochs` must divide every horizon.
    Explicit { rule: LossRule, target: TargetFunction, inner: InnerKind, epochs: usize },
    /// Sign-switching learner for scalar payoffs. Without `actions`, `count` evenly
    /// spaced points of a one-dimensional `P` are used.
    OneDim {
        #[serde(default)]
        actions: Option<Vec<Vec<f64>>>,
        #[serde(default = "default_count")]
        count: usize,
    },
    /// Approachability against projections onto the observed hull.
    TwoDim,
}

fn default_count() -> usize {
    16
}

fn default_factor() -> usize {
    2
}

/// Overrides of the distance solver's tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ToleranceOverrides {
    #[serde(default)]
    pub hull_gap: Option<f64>,
    #[serde(default)]
    pub hull_max_iter: Option<usize>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut t: Tolerances<f64>) -> Tolerances<f64> {
        if let Some(v) = self.hull_gap {
            t.hull_gap = v;
        }
        if let Some(v) = self.hull_max_iter {
            t.hull_max_iter = v;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    pub instance: InstanceRef,
    pub adversary: AdversarySpec,
    pub learner: LearnerSpec,
    pub horizons: Vec<usize>,
    #[serde(default)]
    pub epsilon: f64,
    pub seeds: Vec<u64>,
    /// Prefix checkpoints at `T, T/f, T/f^2, ...`.
    #[serde(default = "default_factor")]
    pub checkpoint_factor: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    /// Record wall-clock times (makes the CSV non-reproducible).
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.check()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn check(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        if self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly increasing".into()));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::Config(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        if self.checkpoint_factor < 2 {
            return Err(Error::Config("checkpoint factor must be at least 2".into()));
        }
        Ok(())
    }

    /// Epoch learner configuration for horizon `t`, if the learner is epoch-based.
    pub fn learner_config(&self, instance: &GameInstance, t: usize) -> Result<Option<LearnerConfig>> {
        Ok(match &self.learner {
            LearnerSpec::Preset { name } => Some(preset(name, t, instance.d_p(), self.epsilon)?),
            LearnerSpec::Explicit { rule, target, inner, epochs } => {
                let c = LearnerConfig {
                    schedule: EpochSchedule::new(t, *epochs)?,
                    rule: *rule,
                    target: *target,
                    inner: *inner,
                };
                c.check()?;
                Some(c)
            }
            _ => None,
        })
    }

    /// Checkpoint rounds for horizon `t`, increasing.
    pub fn checkpoints(&self, t: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut c = t;
        while c >= 1 {
            out.push(c);
            c /= self.checkpoint_factor;
        }
        out.reverse();
        out
    }
}
