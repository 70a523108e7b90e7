//! The epoch-based learner: an outer gradient learner over payoff directions and
//! an inner learner per epoch against a scalarized loss rule.

mod learner;
mod rules;
mod schedule;
mod targets;
mod transcript;

pub use learner::{default_resolution, err_diagnostic, run_epoch_learner, AUDIT_ACTIONS, INNER_MAX_RATE};
pub use rules::{loss_eval, LossRule, RuleTracker};
pub use schedule::{nearest_divisor, preset, preset_config, EpochSchedule, InnerKind, LearnerConfig, Preset};
pub use targets::{target_eval, TargetFunction, TargetValue};
pub use transcript::{EpochRecord, RoundRecord, Transcript};
