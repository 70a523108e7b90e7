use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::hull::sample_directions;
use super::{PointCloud, Tolerances};
use crate::vector::{dot, norm, sub};
use crate::{Error, Result, Scalar};

const ANGLE_MERGE: f64 = 1e-12;

/// Halfspace (Tukey) depth `min_lambda #{i : <lambda, p_i - x> > -eps}`, exact for
/// dimension 1 and 2.
pub fn halfspace_depth<T: Scalar>(x: &[T], cloud: &PointCloud<T>) -> Result<usize> {
    cloud.require(x.len())?;
    let eps = Tolerances::<T>::default().depth_eps;
    match x.len() {
        1 => {
            let up = cloud.points().iter().filter(|p| p[0] - x[0] > -eps).count();
            let down = cloud.points().iter().filter(|p| x[0] - p[0] > -eps).count();
            Ok(up.min(down))
        }
        2 => Ok(depth_2d(x, cloud, eps)),
        d => Err(Error::DimensionTooHigh { max: 2, got: d }),
    }
}

/// Angular sweep over the breakpoints `phi_i +- pi/2`, merged within a tiny angle so
/// that coincident breakpoints are processed together.
fn depth_2d<T: Scalar>(x: &[T], cloud: &PointCloud<T>, eps: T) -> usize {
    let mut always = 0usize;
    let mut phis = Vec::with_capacity(cloud.len());
    for p in cloud.points() {
        let v = sub(p, x);
        if norm(&v) <= eps {
            always += 1;
        } else {
            phis.push(v[1].to_f64_lossy().atan2(v[0].to_f64_lossy()));
        }
    }
    if phis.is_empty() {
        return always;
    }
    let wrap = |a: f64| a.rem_euclid(2.0 * PI);
    // (angle, +1 enter / -1 leave) for counterclockwise motion of lambda
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * phis.len());
    for &phi in &phis {
        events.push((wrap(phi - PI / 2.0), 1));
        events.push((wrap(phi + PI / 2.0), -1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<(f64, i32)> = Vec::new();
    for (a, e) in events {
        match groups.last_mut() {
            Some(g) if a - g.0 <= ANGLE_MERGE => g.1 += e,
            _ => groups.push((a, e)),
        }
    }
    if groups.len() > 1 && groups[0].0 + 2.0 * PI - groups.last().unwrap().0 <= ANGLE_MERGE {
        let last = groups.pop().unwrap();
        groups[0].1 += last.1;
    }
    let g = groups.len();
    if g == 1 {
        // a single merged breakpoint: every point sits on one line through x
        let theta = groups[0].0 + PI;
        return always + count_open(&phis, theta).min(count_open(&phis, groups[0].0 + 1e-6));
    }
    // start in the middle of the widest gap, far from every breakpoint
    let mut start = 0;
    let mut widest = -1.0;
    for i in 0..g {
        let next = if i + 1 < g { groups[i + 1].0 } else { groups[0].0 + 2.0 * PI };
        if next - groups[i].0 > widest {
            widest = next - groups[i].0;
            start = i;
        }
    }
    let theta0 = groups[start].0 + widest / 2.0;
    let mut count = count_open(&phis, theta0) as i64;
    let mut best = count;
    for k in 1..=g {
        let i = (start + k) % g;
        count += groups[i].1 as i64;
        best = best.min(count);
    }
    always + best.max(0) as usize
}

fn count_open(phis: &[f64], theta: f64) -> usize {
    phis.iter().filter(|&&phi| (theta - phi).cos() > 0.0).count()
}

/// Upper bound on the halfspace depth in any dimension from sampled directions
/// refined by a local search.
pub fn halfspace_depth_sampled<T: Scalar>(
    x: &[T],
    cloud: &PointCloud<T>,
    directions: usize,
    seed: u64,
) -> Result<usize> {
    cloud.require(x.len())?;
    let eps = Tolerances::<T>::default().depth_eps;
    let d = x.len();
    let vs: Vec<Vec<T>> = cloud.points().iter().map(|p| sub(p, x)).collect();
    let count = |l: &[T]| vs.iter().filter(|v| dot(l, v) > -eps).count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs = sample_directions::<T>(d, directions.max(1), &mut rng);
    let mut scored: Vec<(usize, Vec<T>)> = dirs.into_iter().map(|l| (count(&l), l)).collect();
    scored.sort_by_key(|s| s.0);
    let mut best = scored[0].0;
    if d == 1 {
        return Ok(best);
    }
    for (mut val, mut l) in scored.into_iter().take(4) {
        let mut step = 0.5f64;
        let mut fails = 0;
        let mut evals = 0;
        while step > 1e-7 && evals < 2000 {
            evals += 1;
            let cand: Vec<T> = l
                .iter()
                .map(|&li| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    li + T::c(step * g)
                })
                .collect();
            let n = norm(&cand);
            if n == T::zero() {
                continue;
            }
            let cand: Vec<T> = cand.into_iter().map(|c| c / n).collect();
            let c = count(&cand);
            if c <= val {
                if c < val {
                    fails = 0;
                }
                val = c;
                l = cand;
            } else {
                fails += 1;
                if fails >= 8 * d {
                    step *= 0.5;
                    fails = 0;
                }
            }
        }
        best = best.min(val);
    }
    Ok(best)
}

/// Membership in the set of points lying in the hull of the cloud after every removal
/// of at most `removals` points, i.e. depth greater than `removals`.
pub fn q_int_membership<T: Scalar>(x: &[T], cloud: &PointCloud<T>, removals: usize) -> Result<bool> {
    let depth = halfspace_depth(x, cloud)?;
    Ok(depth > removals)
}
