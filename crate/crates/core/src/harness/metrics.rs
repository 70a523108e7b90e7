use serde::{Deserialize, Serialize};

use crate::adversaries::image_model;
use crate::game::GameInstance;
use crate::geometry::{convex_hull_2d, dist_to_hull_with, trimmed_region, PointCloud, Tolerances};
use crate::{Error, Result};

/// One (horizon, seed) cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub config_id: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    /// Against the adversary's declared `S(Q)`.
    pub dist_truth: Option<f64>,
    /// Against the ideal-payoff image of the hull of the played losses.
    pub dist_empirical: Option<f64>,
    /// Against the image of the trimmed region of the played losses.
    pub dist_trimmed: Option<f64>,
    pub err_max: Option<f64>,
    /// Largest per-epoch inner regret over the epoch length.
    pub reg_inner: Option<f64>,
    /// Outer regret over the number of epochs.
    pub reg_outer: Option<f64>,
    pub wall_ms: u64,
    pub error: Option<String>,
    #[serde(default)]
    pub details: RunDetails,
}

/// Extra per-run diagnostics (JSON output only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunDetails {
    /// `(t, dist_truth of the first t rounds)`.
    pub checkpoints: Vec<(usize, f64)>,
    pub mesh: Option<f64>,
    pub epochs: Option<usize>,
    pub epoch_len: Option<usize>,
    pub decomposition_bound: Option<f64>,
    pub audit_violations: usize,
    pub max_path_length: Option<f64>,
    pub best_path_length: Option<f64>,
    pub tv_max: Option<f64>,
    pub resets: Option<usize>,
    pub dist_to_c: Option<f64>,
    pub projection_error: Option<f64>,
    pub approach_error: Option<f64>,
    pub cumulative_hull_distance: Option<f64>,
}

impl MetricsRow {
    pub fn new(config_id: &str, horizon: usize, seed: u64) -> Self {
        MetricsRow {
            config_id: config_id.to_string(),
            horizon,
            seed,
            dist_truth: None,
            dist_empirical: None,
            dist_trimmed: None,
            err_max: None,
            reg_inner: None,
            reg_outer: None,
            wall_ms: 0,
            error: None,
            details: RunDetails::default(),
        }
    }

    /// Decomposition audit: `dist_truth <= bound + slack` (vacuous without both).
    pub fn decomposition_holds(&self, slack: f64) -> bool {
        match (self.dist_truth, self.details.decomposition_bound) {
            (Some(d), Some(b)) => d <= b + slack,
            _ => true,
        }
    }
}

/// Distance from `u_bar` to the hull of the target model.
pub fn measure_distance(u_bar: &[f64], model: &PointCloud<f64>, tol: &Tolerances<f64>) -> Result<f64> {
    if model.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(dist_to_hull_with(u_bar, model, tol)?.0)
}

/// Target model built from played losses: the image of their hull, or of their
/// trimmed region when `removals > 0` (planar or scalar losses only).
pub fn empirical_model(
    instance: &GameInstance,
    losses: &[Vec<f64>],
    removals: usize,
    mesh: f64,
) -> Result<Option<PointCloud<f64>>> {
    let cloud = PointCloud::new(losses.to_vec())?;
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let verts: Vec<Vec<f64>> = if removals == 0 {
        match cloud.dim() {
            1 => {
                let lo = losses.iter().map(|l| l[0]).fold(f64::INFINITY, f64::min);
                let hi = losses.iter().map(|l| l[0]).fold(f64::NEG_INFINITY, f64::max);
                vec![vec![lo], vec![hi]]
            }
            2 => {
                let arr: Vec<[f64; 2]> = losses.iter().map(|l| [l[0], l[1]]).collect();
                convex_hull_2d(&arr).into_iter().map(|v| v.to_vec()).collect()
            }
            _ => {
                let mut v = losses.to_vec();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v.dedup();
                v
            }
        }
    } else {
        if cloud.dim() > 2 || removals >= cloud.len() {
            return Ok(None);
        }
        match trimmed_region(&cloud, removals)?.vertices() {
            Some(v) if !v.is_empty() => v,
            _ => return Ok(None),
        }
    };
    image_model(instance, &verts, mesh).map(Some)
}

/// Least-squares fit of `ln dist = intercept + slope ln T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub t_min: usize,
    pub t_max: usize,
    pub points: usize,
    /// Set when `r2 < 0.5`: the slope should not be trusted.
    pub flagged: bool,
}

pub const MIN_FIT_DIST: f64 = 1e-9;

/// Fits a power law to `(T, dist)` pairs, ignoring distances at most `1e-9`.
pub fn fit_rate(points: &[(usize, f64)]) -> Result<RateFit> {
    let pts: Vec<(usize, f64)> = points.iter().copied().filter(|&(t, d)| t > 0 && d > MIN_FIT_DIST).collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { need: 3, got: pts.len() });
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints { need: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(RateFit {
        slope,
        intercept,
        r2,
        t_min: pts.iter().map(|p| p.0).min().unwrap(),
        t_max: pts.iter().map(|p| p.0).max().unwrap(),
        points: pts.len(),
        flagged: r2 < 0.5,
    })
}
