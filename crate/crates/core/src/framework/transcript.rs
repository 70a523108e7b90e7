use std::io::Write;

use serde::{Deserialize, Serialize};

use super::EpochSchedule;
use crate::vector::{self, dot, norm};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub p: Vec<f64>,
    pub ell: Vec<f64>,
    pub u: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proj_dist: Option<f64>,
}

impl RoundRecord {
    pub fn new(round: usize, p: Vec<f64>, ell: Vec<f64>, u: Vec<f64>) -> Self {
        RoundRecord { round, p, ell, u, sign: None, reset: None, proj_dist: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lambda: Vec<f64>,
    pub u_star: Vec<f64>,
    pub ell_hat: Vec<f64>,
    pub g: Vec<f64>,
    /// Learner loss minus the best audited action's loss, summed over the epoch.
    pub inner_regret: f64,
    pub err_diag: f64,
    #[serde(default)]
    pub tv: f64,
    /// Largest per-expert path length of the epoch losses (0 for linear rules).
    #[serde(default)]
    pub max_path_length: f64,
    /// Path length of the best expert.
    #[serde(default)]
    pub best_path_length: f64,
    /// Rounds where an audited action violated the loss lower bound.
    #[serde(default)]
    pub audit_violations: usize,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line<'a> {
    Round(&'a RoundRecord),
    Epoch(&'a EpochRecord),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    pub rounds: Vec<RoundRecord>,
    pub epochs: Vec<EpochRecord>,
    pub schedule: Option<EpochSchedule>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Average payoff over the first `t` rounds.
    pub fn average_until(&self, t: usize) -> Result<Vec<f64>> {
        let us: Vec<Vec<f64>> = self.rounds[..t.min(self.rounds.len())].iter().map(|r| r.u.clone()).collect();
        vector::mean(&us).ok_or(Error::EmptyHistory)
    }

    pub fn final_average(&self) -> Result<Vec<f64>> {
        self.average_until(self.rounds.len())
    }

    /// `g_e` recomputed from the stored rounds.
    pub fn recompute_g(&self, e: usize) -> Result<Vec<f64>> {
        let sched = self.schedule.ok_or(Error::IncompleteEpoch(e))?;
        let range = sched.rounds(e);
        if range.end > self.rounds.len() || e >= self.epochs.len() {
            return Err(Error::IncompleteEpoch(e));
        }
        let ustar = &self.epochs[e].u_star;
        let mut g = vec![0.0; ustar.len()];
        for r in &self.rounds[range.clone()] {
            vector::axpy(&mut g, 1.0, &r.u);
        }
        let n = range.len() as f64;
        Ok(g.iter().zip(ustar).map(|(s, u)| s / n - u).collect())
    }

    /// `||sum_e g_e|| - sum_e <lambda_e, g_e>`.
    pub fn outer_regret(&self) -> f64 {
        let Some(first) = self.epochs.first() else { return 0.0 };
        let mut total = vec![0.0; first.g.len()];
        let mut gained = 0.0;
        for e in &self.epochs {
            vector::axpy(&mut total, 1.0, &e.g);
            gained += dot(&e.lambda, &e.g);
        }
        norm(&total) - gained
    }

    pub fn err_max(&self) -> f64 {
        self.epochs.iter().map(|e| e.err_diag).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inner_regret_max(&self) -> f64 {
        self.epochs.iter().map(|e| e.inner_regret).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max inner / T_e + outer / L + max err`.
    pub fn decomposition_bound(&self) -> f64 {
        let Some(s) = self.schedule else { return f64::INFINITY };
        self.inner_regret_max() / s.epoch_len() as f64 + self.outer_regret() / s.epochs as f64 + self.err_max()
    }

    pub fn audit_violations(&self) -> usize {
        self.epochs.iter().map(|e| e.audit_violations).sum()
    }

    /// One JSON object per round, each epoch record following its last round.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let per = self.schedule.map_or(usize::MAX, |s| s.epoch_len());
        let mut next_epoch = 0;
        for (i, r) in self.rounds.iter().enumerate() {
            serde_json::to_writer(&mut w, &Line::Round(r))?;
            writeln!(w)?;
            if (i + 1) % per == 0 && next_epoch < self.epochs.len() {
                serde_json::to_writer(&mut w, &Line::Epoch(&self.epochs[next_epoch]))?;
                writeln!(w)?;
                next_epoch += 1;
            }
        }
        for e in &self.epochs[next_epoch..] {
            serde_json::to_writer(&mut w, &Line::Epoch(e))?;
            writeln!(w)?;
        }
        Ok(())
    }
}
