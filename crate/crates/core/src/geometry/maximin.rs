use super::{convex_hull_2d, trimmed_region, PointCloud};
use crate::game::{ActionSet, GameInstance};
use crate::lp::{Cmp, LinearProgram};
use crate::vector::{self, dot, norm};
use crate::{Error, Result};

/// `a + <b, p>`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub a: f64,
    pub b: Vec<f64>,
}

impl AffinePiece {
    pub fn eval(&self, p: &[f64]) -> f64 {
        self.a + dot(&self.b, p)
    }
}

const KELLEY_TOL: f64 = 1e-10;
const KELLEY_MAX: usize = 500;
const VERTEX_CAP: usize = 4096;

/// `g(l) = min_{p in P} <lambda, u(p, l)>`.
pub fn maximin_value(lambda: &[f64], l: &[f64], instance: &GameInstance) -> Result<f64> {
    let (c, coef) = instance.payoff.directional_in_p(lambda, l);
    let m = instance.player_set.min_linear(&coef);
    if !m.is_finite() {
        return Err(Error::InnerMinUnbounded);
    }
    Ok(c + m)
}

/// Maximizer of `g` over the hull of the cloud (`removals = 0`) or over the trimmed
/// region. The cloud mean (region centroid) is returned whenever it is optimal,
/// which covers `lambda = 0` and flat `g`.
pub fn maximin_point(
    lambda: &[f64],
    cloud: &PointCloud<f64>,
    instance: &GameInstance,
    removals: usize,
) -> Result<Vec<f64>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if lambda.len() != instance.d() {
        return Err(Error::DimensionMismatch { expected: instance.d(), got: lambda.len() });
    }
    cloud.require(instance.d_l())?;
    let (gens, center) = maximin_generators(cloud, removals)?;
    if norm(lambda) == 0.0 {
        return Ok(center);
    }
    let pieces: Vec<AffinePiece> = gens
        .iter()
        .map(|l| {
            let (a, b) = instance.payoff.directional_in_p(lambda, l);
            AffinePiece { a, b }
        })
        .collect();
    let (w, best) = maximize_concave(&pieces, &instance.player_set)?;
    let g_center = maximin_value(lambda, &center, instance)?;
    if g_center >= best - 1e-12 {
        return Ok(center);
    }
    Ok(vector::combine(&gens, &w))
}

/// Points spanning the maximin feasible set (hull extreme points, or trimmed-region
/// vertices) and its reference centre.
pub fn maximin_generators(cloud: &PointCloud<f64>, removals: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if removals == 0 {
        return Ok((extreme_points(cloud), cloud.mean()?));
    }
    if cloud.dim() > 2 {
        return Err(Error::DimensionTooHigh { max: 2, got: cloud.dim() });
    }
    let region = trimmed_region(cloud, removals)?;
    let verts = region.vertices().unwrap_or_default();
    if verts.is_empty() {
        return Err(Error::Infeasible("trimmed region is empty".into()));
    }
    let c = vector::mean(&verts).unwrap();
    Ok((verts, c))
}

/// Points whose hull equals the cloud's hull (all points beyond two dimensions).
fn extreme_points(cloud: &PointCloud<f64>) -> Vec<Vec<f64>> {
    let pts = cloud.points();
    match cloud.dim() {
        1 => {
            let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                vec![vec![lo]]
            } else {
                vec![vec![lo], vec![hi]]
            }
        }
        2 => {
            let arr: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
            convex_hull_2d(&arr).into_iter().map(|v| v.to_vec()).collect()
        }
        _ => {
            let mut v = pts.to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v.dedup();
            v
        }
    }
}

/// `max_{w in simplex} sum_i w_i a_i + min_{p in P} <sum_i w_i b_i, p>` via an LP with
/// cuts `z <= <sum_i w_i b_i, v>` for points `v` of `P`.
fn maximize_concave(pieces: &[AffinePiece], set: &ActionSet) -> Result<(Vec<f64>, f64)> {
    let k = pieces.len();
    let reach = set_radius(set);
    let big = pieces.iter().map(|p| norm(&p.b) * reach + p.a.abs()).fold(0.0, f64::max) + 1.0;
    let (mut cuts, exact) = match set.vertices() {
        Some(v) if v.len() <= VERTEX_CAP => (v, true),
        _ => (initial_cuts(set), false),
    };
    for _ in 0..KELLEY_MAX {
        // variables: w_0..w_{k-1}, z' = z + big
        let mut lp = LinearProgram::new(k + 1);
        let mut obj: Vec<f64> = pieces.iter().map(|p| -p.a).collect();
        obj.push(-1.0);
        lp.minimize(obj);
        for i in 0..k {
            lp.bounds(i, 0.0, 1.0);
        }
        lp.bounds(k, 0.0, 2.0 * big);
        let mut simplex = vec![1.0; k];
        simplex.push(0.0);
        lp.row(simplex, Cmp::Eq, 1.0);
        for v in &cuts {
            let mut row: Vec<f64> = pieces.iter().map(|p| -dot(&p.b, v)).collect();
            row.push(1.0);
            lp.row(row, Cmp::Le, big);
        }
        let sol = lp.solve()?;
        let w: Vec<f64> = sol.x[..k].iter().map(|x| x.max(0.0)).collect();
        let z = sol.x[k] - big;
        let c = combined(pieces, &w);
        let lin: f64 = pieces.iter().zip(&w).map(|(p, wi)| p.a * wi).sum();
        let vstar = set.argmin_linear(&c);
        let inner = dot(&c, &vstar);
        if !inner.is_finite() {
            return Err(Error::InnerMinUnbounded);
        }
        if exact || inner >= z - KELLEY_TOL {
            return Ok((w, lin + inner));
        }
        cuts.push(vstar);
    }
    Err(Error::Lp("cutting planes did not converge".into()))
}

fn combined(pieces: &[AffinePiece], w: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; pieces[0].b.len()];
    for (p, &wi) in pieces.iter().zip(w) {
        vector::axpy(&mut c, wi, &p.b);
    }
    c
}

fn set_radius(set: &ActionSet) -> f64 {
    match set {
        ActionSet::Ball { radius, .. } => *radius,
        _ => set
            .vertices()
            .map(|vs| vs.iter().map(|v| norm(v)).fold(0.0, f64::max))
            .unwrap_or_else(|| set.diameter()),
    }
}

fn initial_cuts(set: &ActionSet) -> Vec<Vec<f64>> {
    let d = set.dim();
    let mut out = Vec::new();
    for j in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[j] = s;
            out.push(set.argmin_linear(&e));
        }
    }
    out
}

/// `argmin_{p in P} max_i (a_i + <b_i, p>)` together with the attained value.
pub fn minimax_action(set: &ActionSet, pieces: &[AffinePiece]) -> Result<(Vec<f64>, f64)> {
    if pieces.is_empty() {
        return Ok((set.center(), f64::NEG_INFINITY));
    }
    let d = set.dim();
    if let Some(b) = pieces.iter().find(|p| p.b.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: b.b.len() });
    }
    let reach = set_radius(set).max(set.diameter());
    let big = pieces.iter().map(|p| norm(&p.b) * reach + p.a.abs()).fold(0.0, f64::max) + 1.0;
    let value = |p: &[f64]| pieces.iter().map(|q| q.eval(p)).fold(f64::NEG_INFINITY, f64::max);
    match set {
        ActionSet::Polytope { .. } | ActionSet::Simplex { .. } => {
            let verts = set.vertices().unwrap();
            let m = verts.len();
            // variables: mu_0..mu_{m-1}, t' = t + big
            let mut lp = LinearProgram::new(m + 1);
            let mut obj = vec![0.0; m];
            obj.push(1.0);
            lp.minimize(obj);
            let mut simplex = vec![1.0; m];
            simplex.push(0.0);
            lp.row(simplex, Cmp::Eq, 1.0);
            for pc in pieces {
                let mut row: Vec<f64> = verts.iter().map(|v| dot(&pc.b, v)).collect();
                row.push(-1.0);
                lp.row(row, Cmp::Le, -big - pc.a);
            }
            let sol = lp.solve()?;
            let mu: Vec<f64> = sol.x[..m].iter().map(|x| x.max(0.0)).collect();
            let s: f64 = mu.iter().sum();
            let mu: Vec<f64> = mu.into_iter().map(|x| x / s).collect();
            let p = vector::combine(&verts, &mu);
            let v = value(&p);
            Ok((p, v))
        }
        ActionSet::Box { lo, hi } => {
            let mut lp = LinearProgram::new(d + 1);
            let mut obj = vec![0.0; d];
            obj.push(1.0);
            lp.minimize(obj);
            for j in 0..d {
                lp.bounds(j, lo[j], hi[j]);
            }
            add_piece_rows(&mut lp, pieces, d, big);
            let sol = lp.solve()?;
            let p = set.project(&sol.x[..d]);
            let v = value(&p);
            Ok((p, v))
        }
        ActionSet::Ball { radius, .. } => {
            let r = *radius;
            let mut cuts: Vec<Vec<f64>> = Vec::new();
            for j in 0..d {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; d];
                    e[j] = s;
                    cuts.push(e);
                }
            }
            let mut last = vec![0.0; d];
            for _ in 0..KELLEY_MAX {
                let mut lp = LinearProgram::new(d + 1);
                let mut obj = vec![0.0; d];
                obj.push(1.0);
                lp.minimize(obj);
                for j in 0..d {
                    lp.bounds(j, -r, r);
                }
                add_piece_rows(&mut lp, pieces, d, big);
                for g in &cuts {
                    let mut row = g.clone();
                    row.push(0.0);
                    lp.row(row, Cmp::Le, r);
                }
                let sol = lp.solve()?;
                last = sol.x[..d].to_vec();
                let n = norm(&last);
                if n <= r * (1.0 + 1e-9) {
                    break;
                }
                cuts.push(vector::scale(&last, 1.0 / n));
            }
            let p = set.project(&last);
            let v = value(&p);
            Ok((p, v))
        }
    }
}

/// Rows `a_i + <b_i, p> - t <= 0` with `t = t' - big`, `t'` the last variable.
fn add_piece_rows(lp: &mut LinearProgram, pieces: &[AffinePiece], d: usize, big: f64) {
    lp.bounds(d, 0.0, 4.0 * big);
    for pc in pieces {
        let mut row = pc.b.clone();
        row.push(-1.0);
        lp.row(row, Cmp::Le, -big - pc.a);
    }
}
