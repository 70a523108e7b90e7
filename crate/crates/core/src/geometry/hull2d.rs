use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Planar convex hull with counterclockwise vertices, maintained under insertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hull2D<T: Scalar> {
    vertices: Vec<[T; 2]>,
    area: T,
    perimeter: T,
    inserted: usize,
}

impl<T: Scalar> Default for Hull2D<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Hull2D<T> {
    pub fn new() -> Self {
        Self {
            vertices: Vec::new(),
            area: T::zero(),
            perimeter: T::zero(),
            inserted: 0,
        }
    }

    pub fn from_points(points: &[[T; 2]]) -> Self {
        let vertices = convex_hull_2d(points);
        Self {
            area: polygon_area(&vertices),
            perimeter: polygon_perimeter(&vertices),
            vertices,
            inserted: points.len(),
        }
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> T {
        self.area
    }

    /// Boundary length; a segment counts both sides.
    pub fn perimeter(&self) -> T {
        self.perimeter
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Distance from `x` to the hull; 0 for an empty hull.
    pub fn distance(&self, x: [T; 2]) -> T {
        let v = &self.vertices;
        match v.len() {
            0 => T::zero(),
            1 => dist2(v[0], x),
            2 => seg_dist(v[0], v[1], x),
            n => {
                if (0..n).all(|i| cross(v[i], v[(i + 1) % n], x) >= T::zero()) {
                    return T::zero();
                }
                (0..n)
                    .map(|i| seg_dist(v[i], v[(i + 1) % n], x))
                    .fold(T::infinity(), T::min)
            }
        }
    }

    /// Adds `x` and returns its distance to the hull before insertion.
    pub fn insert(&mut self, x: [T; 2]) -> T {
        let before = self.distance(x);
        self.inserted += 1;
        if self.vertices.is_empty() || before > T::zero() {
            let mut pts = self.vertices.clone();
            pts.push(x);
            self.vertices = convex_hull_2d(&pts);
            // never report a decrease caused by rounding
            self.area = polygon_area(&self.vertices).max(self.area);
            self.perimeter = polygon_perimeter(&self.vertices).max(self.perimeter);
        }
        before
    }

    /// Projection of `x` onto the hull (`x` itself when inside or the hull is empty).
    pub fn project(&self, x: [T; 2]) -> [T; 2] {
        let v = &self.vertices;
        match v.len() {
            0 => x,
            1 => v[0],
            2 => seg_proj(v[0], v[1], x),
            n => {
                if (0..n).all(|i| cross(v[i], v[(i + 1) % n], x) >= T::zero()) {
                    return x;
                }
                let mut best = v[0];
                let mut bd = T::infinity();
                for i in 0..n {
                    let p = seg_proj(v[i], v[(i + 1) % n], x);
                    let d = dist2(p, x);
                    if d < bd {
                        bd = d;
                        best = p;
                    }
                }
                best
            }
        }
    }
}

fn cross<T: Scalar>(a: [T; 2], b: [T; 2], c: [T; 2]) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dist2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn seg_proj<T: Scalar>(a: [T; 2], b: [T; 2], x: [T; 2]) -> [T; 2] {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == T::zero() {
        return a;
    }
    let t = (((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / len2).max(T::zero()).min(T::one());
    [a[0] + t * d[0], a[1] + t * d[1]]
}

fn seg_dist<T: Scalar>(a: [T; 2], b: [T; 2], x: [T; 2]) -> T {
    dist2(seg_proj(a, b, x), x)
}

/// Andrew's monotone chain; strictly convex, counterclockwise, starting at the
/// lexicographically smallest point. Collinear input yields its two endpoints.
pub fn convex_hull_2d<T: Scalar>(points: &[[T; 2]]) -> Vec<[T; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<[T; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[T; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area of a counterclockwise polygon.
pub fn polygon_area<T: Scalar>(v: &[[T; 2]]) -> T {
    let n = v.len();
    if n < 3 {
        return T::zero();
    }
    let s: T = (0..n)
        .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
        .sum();
    (s / T::c(2.0)).abs()
}

pub fn polygon_perimeter<T: Scalar>(v: &[[T; 2]]) -> T {
    let n = v.len();
    match n {
        0 | 1 => T::zero(),
        2 => T::c(2.0) * dist2(v[0], v[1]),
        _ => (0..n).map(|i| dist2(v[i], v[(i + 1) % n])).sum(),
    }
}
