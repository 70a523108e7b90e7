use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::{empirical_model, measure_distance, ExperimentConfig, LearnerSpec, MetricsRow};
use crate::adversaries::GROUND_TRUTH_MESH;
use crate::framework::{run_epoch_learner, Transcript};
use crate::game::{validate_instance, GameInstance};
use crate::geometry::Tolerances;
use crate::lowdim::{run_one_dim, run_two_dim};
use crate::{Error, Result};

/// Environment variable whose integer value is added to every configured seed.
pub const SEED_OFFSET_VAR: &str = "APPROACH_LAB_SEED_OFFSET";

pub fn seed_offset() -> Result<u64> {
    match std::env::var(SEED_OFFSET_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_OFFSET_VAR} is not an unsigned integer: {s:?}"))),
        Err(_) => Ok(0),
    }
}

/// Runs every (horizon, seed) cell on `workers` threads, in config order. Cell
/// failures are reported in the row's `error` field.
pub fn run_matrix(config: &ExperimentConfig, workers: usize, seed_offset: u64, base: Option<&Path>) -> Result<Vec<MetricsRow>> {
    config.check()?;
    let instance = config.instance.load(base)?;
    let report = validate_instance(&instance, 2000, 0);
    if !report.is_ok() {
        return Err(Error::Config(format!(
            "instance fails validation: {:?}",
            report.violations.iter().map(|v| v.kind).collect::<Vec<_>>()
        )));
    }
    let cells: Vec<(usize, u64)> = config
        .horizons
        .iter()
        .flat_map(|&t| config.seeds.iter().map(move |&s| (t, s.wrapping_add(seed_offset))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(|| cells.par_iter().map(|&(t, s)| run_cell(config, &instance, t, s)).collect()))
}

/// One run; never fails (errors go to the row).
pub fn run_cell(config: &ExperimentConfig, instance: &GameInstance, horizon: usize, seed: u64) -> MetricsRow {
    let mut row = MetricsRow::new(&config.id, horizon, seed);
    let start = Instant::now();
    if let Err(e) = fill_row(&mut row, config, instance, horizon, seed) {
        row.error = Some(e.to_string());
    }
    if config.timing {
        row.wall_ms = start.elapsed().as_millis() as u64;
    }
    row
}

fn fill_row(row: &mut MetricsRow, config: &ExperimentConfig, instance: &GameInstance, horizon: usize, seed: u64) -> Result<()> {
    let tol = config.tolerances.apply(Tolerances::default());
    let adversary = config.adversary.instantiate(horizon, seed, &instance.adversary_set)?;
    let transcript: Transcript = match &config.learner {
        LearnerSpec::Preset { .. } | LearnerSpec::Explicit { .. } => {
            let lc = config.learner_config(instance, horizon)?.expect("epoch learner");
            let tr = run_epoch_learner(instance, &adversary, &lc, seed)?;
            let d = &mut row.details;
            d.epochs = Some(lc.schedule.epochs);
            d.epoch_len = Some(lc.schedule.epoch_len());
            d.decomposition_bound = Some(tr.decomposition_bound());
            d.audit_violations = tr.audit_violations();
            d.max_path_length = Some(tr.epochs.iter().map(|e| e.max_path_length).fold(0.0, f64::max));
            d.best_path_length = Some(tr.epochs.iter().map(|e| e.best_path_length).fold(0.0, f64::max));
            d.tv_max = Some(tr.epochs.iter().map(|e| e.tv).fold(0.0, f64::max));
            row.err_max = Some(tr.err_max());
            row.reg_inner = Some(tr.inner_regret_max() / lc.schedule.epoch_len() as f64);
            row.reg_outer = Some(tr.outer_regret() / lc.schedule.epochs as f64);
            tr
        }
        LearnerSpec::OneDim { actions, count } => {
            let acts = match actions {
                Some(a) => a.clone(),
                None => grid_actions(instance, *count)?,
            };
            let r = run_one_dim(instance, &adversary, &acts)?;
            row.details.resets = Some(r.resets.len());
            row.details.dist_to_c = Some(r.dist_to_target);
            r.transcript
        }
        LearnerSpec::TwoDim => {
            let r = run_two_dim(instance, &adversary)?;
            row.details.projection_error = Some(r.projection_error);
            row.details.approach_error = Some(r.approach_error);
            row.details.cumulative_hull_distance = Some(r.cumulative_hull_distance);
            r.transcript
        }
    };

    let u_bar = transcript.final_average()?;
    match config.adversary.ground_truth_targets(instance) {
        Ok(gt) => {
            row.dist_truth = Some(measure_distance(&u_bar, &gt.s_model, &tol)?);
            row.details.mesh = Some(gt.mesh);
            for t in config.checkpoints(horizon) {
                let avg = transcript.average_until(t)?;
                row.details.checkpoints.push((t, measure_distance(&avg, &gt.s_model, &tol)?));
            }
        }
        Err(Error::NoGroundTruth) => {}
        Err(e) => return Err(e),
    }
    let losses: Vec<Vec<f64>> = transcript.rounds.iter().map(|r| r.ell.clone()).collect();
    if let Some(m) = empirical_model(instance, &losses, 0, GROUND_TRUTH_MESH)? {
        row.dist_empirical = Some(measure_distance(&u_bar, &m, &tol)?);
    }
    let removals = (config.epsilon * horizon as f64).floor() as usize;
    if removals > 0 {
        if let Some(m) = empirical_model(instance, &losses, removals, GROUND_TRUTH_MESH)? {
            row.dist_trimmed = Some(measure_distance(&u_bar, &m, &tol)?);
        }
    }
    Ok(())
}

/// `count` evenly spaced points of a one-dimensional action set.
pub fn grid_actions(instance: &GameInstance, count: usize) -> Result<Vec<Vec<f64>>> {
    if instance.d_p() != 1 {
        return Err(Error::Config("explicit actions are required when P is not one-dimensional".into()));
    }
    let set = &instance.player_set;
    let lo = -set.support(&[-1.0]);
    let hi = set.support(&[1.0]);
    let n = count.max(1);
    Ok((0..n)
        .map(|k| if n == 1 { vec![0.5 * (lo + hi)] } else { vec![lo + (hi - lo) * k as f64 / (n - 1) as f64] })
        .collect())
}
