use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::game::ActionSet;
use crate::vector::{dist, norm, sub};
use crate::{Error, Result};

/// Default cap on the number of net points.
pub const NET_CAP: usize = 1_000_000;

/// A finite subset of an action set within `resolution` of every point of the set,
/// with pairwise spacing at least `resolution / 2`. Points are sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringNet {
    pub points: Vec<Vec<f64>>,
    pub resolution: f64,
}

impl CoveringNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `x` to the nearest net point and its index (lowest on ties).
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d = dist(p, x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

pub fn build_cover(set: &ActionSet, resolution: f64) -> Result<CoveringNet> {
    build_cover_with_cap(set, resolution, NET_CAP)
}

/// Grid of spacing `resolution / sqrt(d)` over the bounding box, grid points within
/// `resolution / 2` of the set projected onto it, then thinned to spacing `resolution / 2`.
pub fn build_cover_with_cap(set: &ActionSet, resolution: f64, cap: usize) -> Result<CoveringNet> {
    if !(resolution > 0.0) {
        return Err(Error::Config("cover resolution must be positive".into()));
    }
    let d = set.dim();
    if resolution >= set.diameter() {
        return Ok(CoveringNet { points: vec![set.center()], resolution });
    }
    let (lo, hi) = bounding_box(set);
    let spacing = resolution / (d as f64).sqrt();
    let counts: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| ((h - l) / spacing - 1e-12).ceil().max(0.0) as usize + 1)
        .collect();
    let size: f64 = counts.iter().map(|&c| c as f64).product();
    if size > cap as f64 {
        return Err(Error::NetTooLarge { size, cap });
    }
    let total = size as usize;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let g: Vec<f64> = (0..d)
            .map(|j| {
                if counts[j] == 1 {
                    0.5 * (lo[j] + hi[j])
                } else {
                    lo[j] + (hi[j] - lo[j]) * idx[j] as f64 / (counts[j] - 1) as f64
                }
            })
            .collect();
        let p = set.project(&g);
        if dist(&p, &g) <= resolution / 2.0 + 1e-12 {
            candidates.push(p);
        }
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < counts[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    let center = set.center();
    candidates.sort_by(|a, b| {
        dist(a, &center)
            .total_cmp(&dist(b, &center))
            .then_with(|| a.partial_cmp(b).unwrap())
    });
    let mut points = thin(candidates, resolution / 2.0);
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(CoveringNet { points, resolution })
}

fn bounding_box(set: &ActionSet) -> (Vec<f64>, Vec<f64>) {
    match set {
        ActionSet::Ball { dim, radius } => (vec![-radius; *dim], vec![*radius; *dim]),
        ActionSet::Box { lo, hi } => (lo.clone(), hi.clone()),
        ActionSet::Polytope { vertices } => {
            let d = set.dim();
            let lo = (0..d).map(|j| vertices.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min)).collect();
            let hi = (0..d).map(|j| vertices.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
            (lo, hi)
        }
        ActionSet::Simplex { dim } => (vec![0.0; *dim], vec![1.0; *dim]),
    }
}

/// Greedy thinning in the given order: drops points closer than `gap` to a kept one.
fn thin(candidates: Vec<Vec<f64>>, gap: f64) -> Vec<Vec<f64>> {
    let d = candidates.first().map_or(0, |p| p.len());
    let mut kept: Vec<Vec<f64>> = Vec::new();
    if d > 4 {
        for p in candidates {
            if kept.iter().all(|q| dist(q, &p) >= gap - 1e-12) {
                kept.push(p);
            }
        }
        return kept;
    }
    let cell = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / gap).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|m| (0..d).map(|j| (m / 3usize.pow(j as u32) % 3) as i64 - 1).collect())
        .collect();
    for p in candidates {
        let c = cell(&p);
        let clash = offsets.iter().any(|o| {
            let key: Vec<i64> = c.iter().zip(o).map(|(a, b)| a + b).collect();
            grid.get(&key)
                .is_some_and(|ids| ids.iter().any(|&i| dist(&kept[i], &p) < gap - 1e-12))
        });
        if !clash {
            grid.entry(c).or_default().push(kept.len());
            kept.push(p);
        }
    }
    kept
}

/// Largest nearest-net distance over `samples` draws from the set.
pub fn covering_radius_estimate(net: &CoveringNet, set: &ActionSet, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for s in 0..samples {
        let x = if s % 4 == 0 { set.sample_extreme(&mut rng) } else { set.sample(&mut rng) };
        worst = worst.max(net.nearest(&x).1);
    }
    worst
}

/// `min_{net} sum_t f_t - min_{audit grid} sum_t f_t`, the audit grid being a cover
/// of the set at one eighth of the net's resolution.
pub fn lipschitz_discretization_gap(
    net: &CoveringNet,
    set: &ActionSet,
    losses: &[&dyn Fn(&[f64]) -> f64],
) -> Result<f64> {
    let total = |p: &[f64]| losses.iter().map(|f| f(p)).sum::<f64>();
    let on_net = net.points.iter().map(|p| total(p)).fold(f64::INFINITY, f64::min);
    let audit = build_cover(set, net.resolution / 8.0)?;
    let mut on_set = audit.points.iter().map(|p| total(p)).fold(f64::INFINITY, f64::min);
    if let Some(vs) = set.vertices() {
        on_set = vs.iter().map(|p| total(p)).fold(on_set, f64::min);
    }
    Ok(on_net - on_set)
}

#[allow(dead_code)]
fn spread(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(norm(&sub(&points[i], &points[j])));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_half_grid() {
        let net = build_cover(&ActionSet::cube(1, 1.0), 0.5).unwrap();
        let pts: Vec<f64> = net.points.iter().map(|p| p[0]).collect();
        assert_eq!(pts, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn disk_cover_audit() {
        let disk = ActionSet::ball(2, 1.0);
        let net = build_cover(&disk, 0.2).unwrap();
        assert!(covering_radius_estimate(&net, &disk, 10_000, 3) <= 0.2);
        assert!(spread(&net.points) >= 0.1 - 1e-12);
        assert!(net.points.iter().all(|p| disk.contains(p, 1e-9)));
        assert!(net.len() as f64 <= (3.0 * 2.0 / 0.2f64).powi(2));
    }

    #[test]
    fn coarse_resolution_single_point() {
        let net = build_cover(&ActionSet::ball(2, 1.0), 5.0).unwrap();
        assert_eq!(net.points, vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            build_cover_with_cap(&ActionSet::cube(3, 1.0), 0.01, 1000),
            Err(Error::NetTooLarge { .. })
        ));
    }

    #[test]
    fn polytope_cover() {
        let tri = ActionSet::Polytope { vertices: vec![vec![-1.0, -1.0], vec![2.0, -1.0], vec![-1.0, 2.0]] };
        let net = build_cover(&tri, 0.3).unwrap();
        assert!(covering_radius_estimate(&net, &tri, 5000, 1) <= 0.3);
        assert!(spread(&net.points) >= 0.15 - 1e-12);
    }

    #[test]
    fn linear_loss_gap_zero() {
        let set = ActionSet::cube(1, 1.0);
        let net = build_cover(&set, 0.5).unwrap();
        let f = |p: &[f64]| 0.3 * p[0];
        assert_eq!(lipschitz_discretization_gap(&net, &set, &[&f]).unwrap(), 0.0);
    }

    #[test]
    fn abs_loss_gap() {
        let set = ActionSet::cube(1, 1.0);
        let net = build_cover(&set, 0.5).unwrap();
        let f = |p: &[f64]| (p[0] - 0.3).abs();
        let fs: Vec<&dyn Fn(&[f64]) -> f64> = vec![&f; 10];
        let gap = lipschitz_discretization_gap(&net, &set, &fs).unwrap();
        // net minimum 10 * 0.2 = 2, dense minimum within 10 * 0.5 / 16
        assert!((2.0 - 10.0 * 0.5 / 16.0..=10.0 * 0.5).contains(&gap));
    }
}
