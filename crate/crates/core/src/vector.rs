//! Small dense vector helpers over slices.

use crate::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Scalar>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `y += s * x`
pub fn axpy<T: Scalar>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Arithmetic mean of equally sized vectors; `None` when `points` is empty.
pub fn mean<T: Scalar>(points: &[Vec<T>]) -> Option<Vec<T>> {
    let first = points.first()?;
    let mut acc = vec![T::zero(); first.len()];
    for p in points {
        axpy(&mut acc, T::one(), p);
    }
    let n = T::from_usize(points.len()).unwrap();
    Some(acc.into_iter().map(|x| x / n).collect())
}

/// Weighted combination `sum_i w_i p_i`.
pub fn combine<T: Scalar>(points: &[Vec<T>], weights: &[T]) -> Vec<T> {
    let mut acc = vec![T::zero(); points.first().map_or(0, |p| p.len())];
    for (p, &w) in points.iter().zip(weights) {
        if w != T::zero() {
            axpy(&mut acc, w, p);
        }
    }
    acc
}

/// Matrix-vector product for a row-major nested matrix.
pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// Transposed product `m^T y`.
pub fn mat_t_vec(m: &[Vec<f64>], y: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (row, &yi) in m.iter().zip(y) {
        axpy(&mut out, yi, row);
    }
    out
}

/// 2-D cross product of `(b - a)` and `(c - a)`.
pub fn cross3<T: Scalar>(a: &[T], b: &[T], c: &[T]) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}
