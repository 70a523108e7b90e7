use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::hull::sample_directions;
use super::{dist_to_hull, offmax, PointCloud};
use crate::vector::{dot, norm, sub};
use crate::{Error, Result};

const CLIP_TOL: f64 = 1e-12;

/// The trimmed intersection region `{x : depth(x) > N}`: the points that stay in the
/// hull after any removal of at most `N` cloud points.
#[derive(Debug, Clone, PartialEq)]
pub enum TrimmedRegion {
    Empty,
    Interval { lo: f64, hi: f64 },
    /// Counterclockwise vertices (possibly degenerate) and the halfplanes
    /// `<normal, x> <= offset` whose intersection is the region.
    Polygon {
        vertices: Vec<[f64; 2]>,
        halfplanes: Vec<(Vec<f64>, f64)>,
    },
    /// Outer approximation from sampled directions (dimension 3 and up).
    Outer { dim: usize, halfspaces: Vec<(Vec<f64>, f64)> },
}

impl TrimmedRegion {
    pub fn is_empty(&self) -> bool {
        matches!(self, TrimmedRegion::Empty)
    }

    /// Linear description `<normal, x> <= offset`.
    pub fn constraints(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            TrimmedRegion::Empty => Vec::new(),
            TrimmedRegion::Interval { lo, hi } => vec![(vec![1.0], *hi), (vec![-1.0], -*lo)],
            TrimmedRegion::Polygon { halfplanes, .. } => halfplanes.clone(),
            TrimmedRegion::Outer { halfspaces, .. } => halfspaces.clone(),
        }
    }

    /// Extreme points when known exactly.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            TrimmedRegion::Empty => Some(Vec::new()),
            TrimmedRegion::Interval { lo, hi } => {
                if hi - lo <= CLIP_TOL {
                    Some(vec![vec![0.5 * (lo + hi)]])
                } else {
                    Some(vec![vec![*lo], vec![*hi]])
                }
            }
            TrimmedRegion::Polygon { vertices, .. } => Some(vertices.iter().map(|v| v.to_vec()).collect()),
            TrimmedRegion::Outer { .. } => None,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        !self.is_empty() && self.constraints().iter().all(|(n, h)| dot(n, x) <= h + tol)
    }

    /// Euclidean distance from `x` to the region.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(crate::vector::dist(x, &self.project(x)?))
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            TrimmedRegion::Empty => Err(Error::Infeasible("trimmed region is empty".into())),
            TrimmedRegion::Outer { halfspaces, .. } => Ok(dykstra(x, halfspaces)),
            _ => {
                let cloud = PointCloud::new(self.vertices().unwrap())?;
                let (_, w) = dist_to_hull(x, &cloud)?;
                Ok(w.apply(&cloud))
            }
        }
    }

    /// Mean of the known vertices.
    pub fn centroid(&self) -> Option<Vec<f64>> {
        self.vertices().and_then(|v| crate::vector::mean(&v))
    }
}

/// Computes the trimmed region of the cloud for `removals` removals: exact for
/// dimension 1 and 2, an outer approximation otherwise.
pub fn trimmed_region(cloud: &PointCloud<f64>, removals: usize) -> Result<TrimmedRegion> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let n = cloud.len();
    if removals >= n {
        return Ok(TrimmedRegion::Empty);
    }
    match cloud.dim() {
        1 => {
            let vals: Vec<f64> = cloud.points().iter().map(|p| p[0]).collect();
            let neg: Vec<f64> = vals.iter().map(|v| -v).collect();
            let hi = offmax(&vals, removals);
            let lo = -offmax(&neg, removals);
            if lo > hi + CLIP_TOL {
                Ok(TrimmedRegion::Empty)
            } else {
                Ok(TrimmedRegion::Interval { lo: lo.min(hi), hi: hi.max(lo) })
            }
        }
        2 => Ok(region_2d(cloud, removals)),
        d => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7219);
            let dirs = sample_directions::<f64>(d, 2000 * d, &mut rng);
            let halfspaces = dirs
                .into_iter()
                .map(|l| {
                    let vals: Vec<f64> = cloud.points().iter().map(|p| dot(&l, p)).collect();
                    let h = offmax(&vals, removals);
                    (l, h)
                })
                .collect();
            Ok(TrimmedRegion::Outer { dim: d, halfspaces })
        }
    }
}

fn dir(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

/// Kinetic walk of the `(N+1)`-level of the projections around the circle. Between
/// consecutive recorded angles the level is attained by one fixed point, so the
/// halfplanes at those angles cut out the region exactly.
fn region_2d(cloud: &PointCloud<f64>, removals: usize) -> TrimmedRegion {
    let c = cloud.mean().unwrap();
    let q: Vec<[f64; 2]> = cloud.points().iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
    let n = q.len();
    let radius = q.iter().map(|p| norm(p)).fold(0.0, f64::max);
    let arcs = (4 * n).clamp(64, 4096);
    let step = 2.0 * PI / arcs as f64;
    let margin = 2.0 * radius * step + 1e-12;
    let proj = |i: usize, t: f64| q[i][0] * t.cos() + q[i][1] * t.sin();

    let mut planes: Vec<(f64, f64)> = Vec::new();
    let mut vals = vec![0.0; n];
    for s in 0..arcs {
        let t0 = s as f64 * step;
        let t1 = t0 + step;
        for (i, v) in vals.iter_mut().enumerate() {
            *v = proj(i, t0);
        }
        let level = offmax(&vals, removals);
        planes.push((t0, level));
        let cand: Vec<usize> = (0..n).filter(|&i| (vals[i] - level).abs() <= margin).collect();
        let above = (0..n).filter(|&i| vals[i] > level + margin).count();
        let rank = removals - above;
        let level_point = |t: f64| -> usize {
            let mut order = cand.clone();
            order.sort_by(|&a, &b| proj(b, t).total_cmp(&proj(a, t)));
            order[rank.min(order.len() - 1)]
        };
        let mut t = t0;
        let mut cur = level_point(t0 + 1e-10);
        let mut guard = 0;
        while guard < 4 * cand.len() * cand.len() + 8 {
            guard += 1;
            let mut next = t1;
            for &j in &cand {
                if j == cur {
                    continue;
                }
                let dx = q[j][0] - q[cur][0];
                let dy = q[j][1] - q[cur][1];
                if dx == 0.0 && dy == 0.0 {
                    continue;
                }
                let psi = dy.atan2(dx);
                for z in [psi - PI / 2.0, psi + PI / 2.0] {
                    // first zero of cos(theta - psi) strictly after t
                    let k = ((t + 1e-12 - z) / (2.0 * PI)).ceil();
                    let zz = z + k * 2.0 * PI;
                    if zz < next {
                        next = zz;
                    }
                }
            }
            if next >= t1 {
                break;
            }
            planes.push((next, proj(cur, next)));
            t = next;
            cur = level_point(next + 1e-10);
        }
    }

    let big = radius + 1.0;
    let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for &(t, h) in &planes {
        poly = clip(&poly, dir(t), h);
        if poly.is_empty() {
            return TrimmedRegion::Empty;
        }
    }
    let mut vertices: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    for v in poly {
        if vertices.last().is_none_or(|w: &[f64; 2]| (w[0] - v[0]).abs() + (w[1] - v[1]).abs() > 1e-12) {
            vertices.push(v);
        }
    }
    while vertices.len() > 1 {
        let (a, b) = (vertices[0], *vertices.last().unwrap());
        if (a[0] - b[0]).abs() + (a[1] - b[1]).abs() > 1e-12 {
            break;
        }
        vertices.pop();
    }
    let vertices: Vec<[f64; 2]> = vertices.into_iter().map(|v| [v[0] + c[0], v[1] + c[1]]).collect();
    let halfplanes = planes
        .into_iter()
        .map(|(t, h)| {
            let d = dir(t);
            (d.to_vec(), h + d[0] * c[0] + d[1] * c[1])
        })
        .collect();
    TrimmedRegion::Polygon { vertices, halfplanes }
}

/// Sutherland-Hodgman clip of a convex polygon by `<nrm, x> <= h`.
fn clip(poly: &[[f64; 2]], nrm: [f64; 2], h: f64) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| nrm[0] * p[0] + nrm[1] * p[1] - h;
    let mut out = Vec::with_capacity(poly.len() + 1);
    let m = poly.len();
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let (sa, sb) = (side(a), side(b));
        let ina = sa <= CLIP_TOL;
        let inb = sb <= CLIP_TOL;
        if ina {
            out.push(a);
        }
        if ina != inb && (sa - sb).abs() > 0.0 {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Dykstra's alternating projections onto an intersection of halfspaces.
fn dykstra(x: &[f64], halfspaces: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut incr = vec![vec![0.0; x.len()]; halfspaces.len()];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for (k, (nrm, h)) in halfspaces.iter().enumerate() {
            let z: Vec<f64> = y.iter().zip(&incr[k]).map(|(a, b)| a + b).collect();
            let nn = dot(nrm, nrm);
            let ex = dot(nrm, &z) - h;
            let p: Vec<f64> = if ex > 0.0 {
                z.iter().zip(nrm).map(|(zi, ni)| zi - ex / nn * ni).collect()
            } else {
                z.clone()
            };
            incr[k] = sub(&z, &p);
            moved = moved.max(crate::vector::dist(&p, &y));
            y = p;
        }
        if moved < 1e-12 {
            break;
        }
    }
    y
}
