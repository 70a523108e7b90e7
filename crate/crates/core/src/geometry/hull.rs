use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{support, PointCloud, Tolerances, WeightVector};
use crate::vector::{axpy, dot, norm, sub};
use crate::{Result, Scalar};

/// Distance from `x` to the convex hull of the cloud, with the minimizing weights.
pub fn dist_to_hull<T: Scalar>(x: &[T], cloud: &PointCloud<T>) -> Result<(T, WeightVector<T>)> {
    dist_to_hull_with(x, cloud, &Tolerances::default())
}

pub fn dist_to_hull_with<T: Scalar>(
    x: &[T],
    cloud: &PointCloud<T>,
    tol: &Tolerances<T>,
) -> Result<(T, WeightVector<T>)> {
    cloud.require(x.len())?;
    let ys: Vec<Vec<T>> = cloud.points().iter().map(|p| sub(p, x)).collect();
    let w = min_norm_point(&ys, tol);
    let mut z = vec![T::zero(); x.len()];
    for (y, &wi) in ys.iter().zip(&w) {
        if wi != T::zero() {
            axpy(&mut z, wi, y);
        }
    }
    Ok((norm(&z), WeightVector::from_raw(w)))
}

/// Euclidean projection of `x` onto the hull of the cloud.
pub fn project_to_hull<T: Scalar>(x: &[T], cloud: &PointCloud<T>) -> Result<Vec<T>> {
    let (_, w) = dist_to_hull(x, cloud)?;
    Ok(w.apply(cloud))
}

/// Wolfe's min-norm-point method over `conv(ys)`; returns weights over all of `ys`.
fn min_norm_point<T: Scalar>(ys: &[Vec<T>], tol: &Tolerances<T>) -> Vec<T> {
    let n = ys.len();
    let scale = ys.iter().map(|y| norm(y)).fold(T::zero(), T::max).max(T::min_positive_value());
    let tiny = T::epsilon() * T::c(16.0);
    let start = (0..n)
        .min_by(|&a, &b| dot(&ys[a], &ys[a]).partial_cmp(&dot(&ys[b], &ys[b])).unwrap())
        .unwrap();
    let mut active = vec![start];
    let mut w = vec![T::one()];
    let mut x = ys[start].clone();

    for _ in 0..tol.hull_max_iter {
        let xx = dot(&x, &x);
        if xx.sqrt() <= tiny * scale {
            break;
        }
        let (j, xy) = (0..n)
            .map(|j| (j, dot(&x, &ys[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        // ||x|| - dist <= gap / ||x||
        let gap = xx - xy;
        if gap <= tol.hull_gap * scale * xx.sqrt() || active.contains(&j) {
            break;
        }
        active.push(j);
        w.push(T::zero());

        loop {
            let v = match affine_min_norm(ys, &active) {
                Some(v) => v,
                None => {
                    active.pop();
                    w.pop();
                    return expand(n, &active, &w);
                }
            };
            if v.iter().all(|&vi| vi > tiny) {
                w = v;
                break;
            }
            let mut theta = T::one();
            for (wi, vi) in w.iter().zip(&v) {
                if *vi <= tiny {
                    let denom = *wi - *vi;
                    if denom > T::zero() {
                        theta = theta.min(*wi / denom);
                    }
                }
            }
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi = (T::one() - theta) * *wi + theta * *vi;
            }
            let mut k = 0;
            let mut removed = false;
            while k < active.len() {
                if w[k] <= tiny {
                    active.remove(k);
                    w.remove(k);
                    removed = true;
                } else {
                    k += 1;
                }
            }
            if !removed {
                // numerical stall: drop the smallest weight to guarantee progress
                let (m, _) = w
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap();
                active.remove(m);
                w.remove(m);
            }
            let s: T = w.iter().copied().sum();
            w.iter_mut().for_each(|wi| *wi /= s);
            if active.len() == 1 {
                w = vec![T::one()];
                break;
            }
        }
        x = vec![T::zero(); x.len()];
        for (&i, &wi) in active.iter().zip(&w) {
            axpy(&mut x, wi, &ys[i]);
        }
    }
    expand(n, &active, &w)
}

fn expand<T: Scalar>(n: usize, active: &[usize], w: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (&i, &wi) in active.iter().zip(w) {
        out[i] = wi;
    }
    out
}

/// Minimum-norm point of the affine hull of `ys[active]`, as affine weights.
/// Solves the bordered system `[G 1; 1^T 0] [v; mu] = [0; 1]`.
fn affine_min_norm<T: Scalar>(ys: &[Vec<T>], active: &[usize]) -> Option<Vec<T>> {
    let m = active.len();
    let size = m + 1;
    let mut a = vec![vec![T::zero(); size + 1]; size];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = dot(&ys[active[r]], &ys[active[c]]);
        }
        a[r][m] = T::one();
        a[m][r] = T::one();
    }
    a[m][size] = T::one();
    let scale = (0..m).map(|r| a[r][r]).fold(T::one(), T::max);
    for col in 0..size {
        let piv = (col..size).max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())?;
        if a[piv][col].abs() <= T::epsilon() * T::c(64.0) * scale {
            return None;
        }
        a.swap(col, piv);
        for r in 0..size {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != T::zero() {
                    for c in col..=size {
                        let t = a[col][c];
                        a[r][c] -= f * t;
                    }
                }
            }
        }
    }
    Some((0..m).map(|r| a[r][size] / a[r][r]).collect())
}

/// Lower bound on the hull distance from its support-function dual, maximized over
/// sampled unit directions and refined by a local pattern search. Clamped at 0.
pub fn dist_via_support<T: Scalar>(x: &[T], cloud: &PointCloud<T>, directions: usize) -> Result<T> {
    cloud.require(x.len())?;
    let d = x.len();
    let f = |l: &[T]| dot(l, x) - support(cloud, l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1);
    let dirs = sample_directions::<T>(d, directions.max(1), &mut rng);
    if d == 1 {
        let best = dirs.iter().map(|l| f(l)).fold(T::neg_infinity(), T::max);
        return Ok(best.max(T::zero()));
    }
    let mut scored: Vec<(T, Vec<T>)> = dirs.into_iter().map(|l| (f(&l), l)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored.truncate(4);
    let mut best = T::neg_infinity();
    for (mut val, mut l) in scored {
        let mut step = T::c(2.0 * std::f64::consts::PI / directions.max(4) as f64).min(T::c(0.5));
        let mut fails = 0;
        let mut evals = 0;
        while step > T::c(1e-9) && evals < 4000 {
            evals += 1;
            let cand: Vec<T> = l
                .iter()
                .map(|&li| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    li + step * T::c(g)
                })
                .collect();
            let n = norm(&cand);
            if n == T::zero() {
                continue;
            }
            let cand: Vec<T> = cand.into_iter().map(|c| c / n).collect();
            let v = f(&cand);
            if v > val {
                val = v;
                l = cand;
                fails = 0;
            } else {
                fails += 1;
                if fails >= 4 * d {
                    step *= T::c(0.5);
                    fails = 0;
                }
            }
        }
        best = best.max(val);
        best = best.max(polish(x, cloud, &l, &f));
    }
    Ok(best.max(T::zero()))
}

/// Local search stalls on ridges of the support function, so also try the normals of
/// the affine hulls of small subsets of the points that are nearly active at `l`. Every
/// candidate is a unit vector, so the result is still a lower bound.
fn polish<T: Scalar>(x: &[T], cloud: &PointCloud<T>, l: &[T], f: &impl Fn(&[T]) -> T) -> T {
    let d = x.len();
    let mut scored: Vec<(T, usize)> = cloud.points().iter().enumerate().map(|(i, p)| (dot(l, p), i)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored.truncate(8);
    let shifted: Vec<Vec<T>> = scored.iter().map(|&(_, i)| sub(&cloud.points()[i], x)).collect();
    let k = shifted.len();
    let mut best = T::neg_infinity();
    for mask in 1usize..(1 << k) {
        if mask.count_ones() as usize > d {
            continue;
        }
        let active: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let Some(w) = affine_min_norm(&shifted, &active) else { continue };
        let mut y = vec![T::zero(); d];
        for (&i, &wi) in active.iter().zip(&w) {
            axpy(&mut y, wi, &shifted[i]);
        }
        let n = norm(&y);
        if n > T::zero() {
            let cand: Vec<T> = y.iter().map(|&v| -v / n).collect();
            best = best.max(f(&cand));
        }
    }
    best
}

/// Unit directions: `±1` in one dimension, evenly spaced angles in two, Gaussian draws otherwise.
pub(crate) fn sample_directions<T: Scalar>(d: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    match d {
        1 => vec![vec![T::one()], vec![-T::one()]],
        2 => (0..count.max(4))
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count.max(4) as f64;
                vec![T::c(a.cos()), T::c(a.sin())]
            })
            .collect(),
        _ => (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                let n = norm(&v).max(1e-300);
                v.into_iter().map(|c| T::c(c / n)).collect()
            })
            .collect(),
    }
}
