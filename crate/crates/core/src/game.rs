//! Game instances: action sets, bi-affine payoffs and response functions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geometry::{self, PointCloud};
use crate::vector::{self, dot, norm};
use crate::{Error, Result, Scalar};

/// Membership tolerance shared by every set test.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ActionSet {
    Ball { dim: usize, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polytope { vertices: Vec<Vec<f64>> },
    /// The probability simplex `{x >= 0, sum x = 1}` in `R^dim`.
    Simplex { dim: usize },
}

impl ActionSet {
    pub fn ball(dim: usize, radius: f64) -> Self {
        ActionSet::Ball { dim, radius }
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        ActionSet::Box {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ActionSet::Ball { dim, .. } | ActionSet::Simplex { dim } => *dim,
            ActionSet::Box { lo, .. } => lo.len(),
            ActionSet::Polytope { vertices } => vertices.first().map_or(0, |v| v.len()),
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        match self {
            ActionSet::Ball { dim, radius } => {
                if *dim == 0 || !(*radius > 0.0) {
                    return Err(Error::Config("ball needs dim > 0 and radius > 0".into()));
                }
            }
            ActionSet::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(Error::Config("box bounds malformed".into()));
                }
            }
            ActionSet::Polytope { vertices } => {
                let d = self.dim();
                if vertices.is_empty() || d == 0 {
                    return Err(Error::Config("polytope needs at least one vertex".into()));
                }
                if let Some(v) = vertices.iter().find(|v| v.len() != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: v.len() });
                }
            }
            ActionSet::Simplex { dim } => {
                if *dim == 0 {
                    return Err(Error::Config("simplex needs dim > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// `sigma(dir) = max_{x in set} <dir, x>`.
    pub fn support(&self, dir: &[f64]) -> f64 {
        match self {
            ActionSet::Ball { radius, .. } => radius * norm(dir),
            ActionSet::Box { lo, hi } => dir
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(d, (l, h))| (d * l).max(d * h))
                .sum(),
            ActionSet::Polytope { vertices } => {
                vertices.iter().map(|v| dot(v, dir)).fold(f64::NEG_INFINITY, f64::max)
            }
            ActionSet::Simplex { .. } => dir.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// A point minimizing `<c, x>` over the set (lowest index on ties).
    pub fn argmin_linear(&self, c: &[f64]) -> Vec<f64> {
        match self {
            ActionSet::Ball { dim, radius } => {
                let n = norm(c);
                if n == 0.0 {
                    vec![0.0; *dim]
                } else {
                    c.iter().map(|x| -radius * x / n).collect()
                }
            }
            ActionSet::Box { lo, hi } => c
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(ci, (l, h))| if *ci > 0.0 { *l } else if *ci < 0.0 { *h } else { 0.5 * (l + h) })
                .collect(),
            ActionSet::Polytope { vertices } => {
                let mut best = 0;
                let mut val = f64::INFINITY;
                for (i, v) in vertices.iter().enumerate() {
                    let s = dot(v, c);
                    if s < val {
                        val = s;
                        best = i;
                    }
                }
                vertices[best].clone()
            }
            ActionSet::Simplex { dim } => {
                let mut best = 0;
                for i in 1..*dim {
                    if c[i] < c[best] {
                        best = i;
                    }
                }
                let mut e = vec![0.0; *dim];
                e[best] = 1.0;
                e
            }
        }
    }

    /// `min_{x in set} <c, x>`.
    pub fn min_linear(&self, c: &[f64]) -> f64 {
        let neg: Vec<f64> = c.iter().map(|x| -x).collect();
        -self.support(&neg)
    }

    /// Finite list of extreme points, when the set has one.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            ActionSet::Ball { .. } => None,
            ActionSet::Box { lo, hi } => {
                let d = lo.len();
                if d > 20 {
                    return None;
                }
                Some(
                    (0..1usize << d)
                        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect())
                        .collect(),
                )
            }
            ActionSet::Polytope { vertices } => Some(vertices.clone()),
            ActionSet::Simplex { dim } => Some(
                (0..*dim)
                    .map(|i| {
                        let mut e = vec![0.0; *dim];
                        e[i] = 1.0;
                        e
                    })
                    .collect(),
            ),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            ActionSet::Ball { dim, .. } => vec![0.0; *dim],
            ActionSet::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
            ActionSet::Polytope { vertices } => vector::mean(vertices).unwrap_or_default(),
            ActionSet::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ActionSet::Ball { radius, .. } => 2.0 * radius,
            ActionSet::Box { lo, hi } => vector::dist(lo, hi),
            ActionSet::Polytope { vertices } => {
                let mut best = 0.0f64;
                for i in 0..vertices.len() {
                    for j in i + 1..vertices.len() {
                        best = best.max(vector::dist(&vertices[i], &vertices[j]));
                    }
                }
                best
            }
            ActionSet::Simplex { dim } => {
                if *dim > 1 {
                    2f64.sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &[f64]) -> f64 {
        vector::dist(x, &self.project(x))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ActionSet::Ball { radius, .. } => norm(x) <= radius + tol,
            ActionSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            _ => self.distance(x) <= tol,
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ActionSet::Ball { radius, .. } => {
                let n = norm(x);
                if n <= *radius {
                    x.to_vec()
                } else {
                    vector::scale(x, radius / n)
                }
            }
            ActionSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| v.clamp(*l, *h))
                .collect(),
            ActionSet::Polytope { vertices } => {
                let cloud = PointCloud::new(vertices.clone()).expect("validated polytope");
                geometry::project_to_hull(x, &cloud).expect("nonempty polytope")
            }
            ActionSet::Simplex { .. } => project_simplex(x),
        }
    }

    /// Draws a point of the set (uniform for balls and boxes, flat-Dirichlet
    /// combinations of vertices for polytopes and simplices).
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            ActionSet::Ball { dim, radius } => {
                let dir = random_direction(*dim, rng);
                let r = radius * rng.gen::<f64>().powf(1.0 / *dim as f64);
                vector::scale(&dir, r)
            }
            ActionSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if h > l { rng.gen_range(*l..=*h) } else { *l })
                .collect(),
            ActionSet::Polytope { vertices } => {
                let w = flat_dirichlet(vertices.len(), rng);
                vector::combine(vertices, &w)
            }
            ActionSet::Simplex { dim } => flat_dirichlet(*dim, rng),
        }
    }

    /// Draws a point on the relative boundary where the set's extreme points live.
    pub fn sample_extreme(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            ActionSet::Ball { dim, radius } => vector::scale(&random_direction(*dim, rng), *radius),
            ActionSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| if rng.gen::<bool>() { *h } else { *l })
                .collect(),
            ActionSet::Polytope { vertices } => vertices[rng.gen_range(0..vertices.len())].clone(),
            ActionSet::Simplex { dim } => {
                let mut e = vec![0.0; *dim];
                e[rng.gen_range(0..*dim)] = 1.0;
                e
            }
        }
    }
}

/// Uniform direction on the unit sphere of `R^dim`.
pub fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return vector::scale(&v, 1.0 / n);
        }
    }
}

/// Dirichlet(1, ..., 1) weights.
pub fn flat_dirichlet(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(x: &[f64]) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    x.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// `u(p, l)_k = u0_k + (A p)_k + (B l)_k + p^T C_k l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiAffinePayoff {
    pub u0: Vec<f64>,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B", default)]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C", default)]
    pub c: Vec<Vec<Vec<f64>>>,
}

impl BiAffinePayoff {
    /// Zero payoff of the given dimensions.
    pub fn zeros(d: usize, d_p: usize, d_l: usize) -> Self {
        Self {
            u0: vec![0.0; d],
            a: vec![vec![0.0; d_p]; d],
            b: vec![vec![0.0; d_l]; d],
            c: vec![vec![vec![0.0; d_l]; d_p]; d],
        }
    }

    /// Pure bilinear payoff `u_k = p^T C_k l`.
    pub fn bilinear(c: Vec<Vec<Vec<f64>>>) -> Self {
        let d = c.len();
        let d_p = c[0].len();
        let d_l = c[0][0].len();
        let mut out = Self::zeros(d, d_p, d_l);
        out.c = c;
        out
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    /// Fills omitted blocks with zeros and checks shapes against `(d_p, d_l)`.
    pub fn normalize(&mut self, d_p: usize, d_l: usize) -> Result<()> {
        let d = self.u0.len();
        if self.a.is_empty() {
            self.a = vec![vec![0.0; d_p]; d];
        }
        if self.b.is_empty() {
            self.b = vec![vec![0.0; d_l]; d];
        }
        if self.c.is_empty() {
            self.c = vec![vec![vec![0.0; d_l]; d_p]; d];
        }
        let bad = |e: usize, g: usize| Err(Error::DimensionMismatch { expected: e, got: g });
        if self.a.len() != d {
            return bad(d, self.a.len());
        }
        if let Some(r) = self.a.iter().find(|r| r.len() != d_p) {
            return bad(d_p, r.len());
        }
        if self.b.len() != d {
            return bad(d, self.b.len());
        }
        if let Some(r) = self.b.iter().find(|r| r.len() != d_l) {
            return bad(d_l, r.len());
        }
        if self.c.len() != d {
            return bad(d, self.c.len());
        }
        for ck in &self.c {
            if ck.len() != d_p {
                return bad(d_p, ck.len());
            }
            if let Some(r) = ck.iter().find(|r| r.len() != d_l) {
                return bad(d_l, r.len());
            }
        }
        Ok(())
    }

    pub fn eval(&self, p: &[f64], l: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let bil: f64 = self.c[k].iter().zip(p).map(|(row, pi)| pi * dot(row, l)).sum();
                self.u0[k] + dot(&self.a[k], p) + dot(&self.b[k], l) + bil
            })
            .collect()
    }

    /// `<lambda, u(p, l)> = constant + <coef, p>` for fixed `lambda` and `l`.
    pub fn directional_in_p(&self, lambda: &[f64], l: &[f64]) -> (f64, Vec<f64>) {
        let d_p = self.a.first().map_or(0, |r| r.len());
        let mut coef = vec![0.0; d_p];
        let mut constant = 0.0;
        for (k, &lk) in lambda.iter().enumerate() {
            if lk == 0.0 {
                continue;
            }
            constant += lk * (self.u0[k] + dot(&self.b[k], l));
            for (j, cj) in coef.iter_mut().enumerate() {
                *cj += lk * (self.a[k][j] + dot(&self.c[k][j], l));
            }
        }
        (constant, coef)
    }

    /// `<lambda, u(p, l)> = constant + <coef, l>` for fixed `lambda` and `p`.
    pub fn directional_in_l(&self, lambda: &[f64], p: &[f64]) -> (f64, Vec<f64>) {
        let d_l = self.b.first().map_or(0, |r| r.len());
        let mut coef = vec![0.0; d_l];
        let mut constant = 0.0;
        for (k, &lk) in lambda.iter().enumerate() {
            if lk == 0.0 {
                continue;
            }
            constant += lk * (self.u0[k] + dot(&self.a[k], p));
            for (i, ci) in coef.iter_mut().enumerate() {
                let bil: f64 = self.c[k].iter().zip(p).map(|(row, pj)| pj * row[i]).sum();
                *ci += lk * (self.b[k][i] + bil);
            }
        }
        (constant, coef)
    }

    /// Returns the payoff scaled by `s` (used to normalize `max ||u|| <= 1`).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            u0: vector::scale(&self.u0, s),
            a: self.a.iter().map(|r| vector::scale(r, s)).collect(),
            b: self.b.iter().map(|r| vector::scale(r, s)).collect(),
            c: self
                .c
                .iter()
                .map(|m| m.iter().map(|r| vector::scale(r, s)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Strict constraints are `normal . l < offset`, otherwise `<=`.
    #[serde(default)]
    pub strict: bool,
}

impl Halfspace {
    fn holds(&self, l: &[f64]) -> bool {
        let v = dot(&self.normal, l);
        if self.strict {
            v < self.offset
        } else {
            v <= self.offset + MEMBERSHIP_TOL
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub constraints: Vec<Halfspace>,
    pub action: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResponseFunction {
    /// First cell (in order) whose constraints all hold.
    PiecewiseConstant { cells: Vec<Cell> },
    /// `p*(l) = proj_P(M l + offset)`.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// Nearest node of a regular grid over the box `[lo, hi]`, nodes in row-major order
    /// (last coordinate fastest).
    Tabulated {
        lo: Vec<f64>,
        hi: Vec<f64>,
        counts: Vec<usize>,
        actions: Vec<Vec<f64>>,
    },
    /// `p*(l)_i = scale * sign(l_i)` with `sign(0) = +1`.
    Sign {
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ResponseFunction {
    fn raw(&self, l: &[f64]) -> Result<Vec<f64>> {
        match self {
            ResponseFunction::PiecewiseConstant { cells } => cells
                .iter()
                .find(|c| c.constraints.iter().all(|h| h.holds(l)))
                .map(|c| c.action.clone())
                .ok_or_else(|| Error::UncoveredPoint { point: l.to_vec() }),
            ResponseFunction::Affine { matrix, offset } => {
                Ok(vector::add(&vector::mat_vec(matrix, l), offset))
            }
            ResponseFunction::Tabulated { lo, hi, counts, actions } => {
                if l.len() != lo.len() {
                    return Err(Error::DimensionMismatch { expected: lo.len(), got: l.len() });
                }
                let mut idx = 0usize;
                for i in 0..lo.len() {
                    let n = counts[i].max(1);
                    let k = if n == 1 || hi[i] <= lo[i] {
                        0
                    } else {
                        let step = (hi[i] - lo[i]) / (n - 1) as f64;
                        (((l[i] - lo[i]) / step).round().max(0.0) as usize).min(n - 1)
                    };
                    idx = idx * n + k;
                }
                actions
                    .get(idx)
                    .cloned()
                    .ok_or_else(|| Error::UncoveredPoint { point: l.to_vec() })
            }
            ResponseFunction::Sign { scale } => Ok(l
                .iter()
                .map(|&x| if x >= 0.0 { *scale } else { -*scale })
                .collect()),
        }
    }
}

/// The full instance `(P, L, u, p*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    pub player_set: ActionSet,
    pub adversary_set: ActionSet,
    pub payoff: BiAffinePayoff,
    pub response: ResponseFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub d_p: usize,
    pub d_l: usize,
    pub d: usize,
    pub player_set: ActionSet,
    pub adversary_set: ActionSet,
    pub payoff: BiAffinePayoff,
    pub response: ResponseFunction,
}

impl GameInstance {
    pub fn new(
        player_set: ActionSet,
        adversary_set: ActionSet,
        mut payoff: BiAffinePayoff,
        response: ResponseFunction,
    ) -> Result<Self> {
        player_set.check_shape()?;
        adversary_set.check_shape()?;
        payoff.normalize(player_set.dim(), adversary_set.dim())?;
        Ok(Self {
            player_set,
            adversary_set,
            payoff,
            response,
        })
    }

    pub fn d_p(&self) -> usize {
        self.player_set.dim()
    }

    pub fn d_l(&self) -> usize {
        self.adversary_set.dim()
    }

    pub fn d(&self) -> usize {
        self.payoff.dim()
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let inst = Self::new(file.player_set, file.adversary_set, file.payoff, file.response)?;
        for (expected, got) in [(file.d_p, inst.d_p()), (file.d_l, inst.d_l()), (file.d, inst.d())] {
            if expected != got {
                return Err(Error::DimensionMismatch { expected, got });
            }
        }
        Ok(inst)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            d_p: self.d_p(),
            d_l: self.d_l(),
            d: self.d(),
            player_set: self.player_set.clone(),
            adversary_set: self.adversary_set.clone(),
            payoff: self.payoff.clone(),
            response: self.response.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    fn check_dims(&self, p: &[f64], l: &[f64]) -> Result<()> {
        if p.len() != self.d_p() {
            return Err(Error::DimensionMismatch { expected: self.d_p(), got: p.len() });
        }
        if l.len() != self.d_l() {
            return Err(Error::DimensionMismatch { expected: self.d_l(), got: l.len() });
        }
        Ok(())
    }

    /// Checked payoff: both actions must lie in their sets.
    pub fn payoff(&self, p: &[f64], l: &[f64]) -> Result<Vec<f64>> {
        self.check_dims(p, l)?;
        if !self.player_set.contains(p, MEMBERSHIP_TOL) {
            return Err(Error::MembershipViolation {
                what: "learner action",
                excess: self.player_set.distance(p),
            });
        }
        if !self.adversary_set.contains(l, MEMBERSHIP_TOL) {
            return Err(Error::MembershipViolation {
                what: "adversary action",
                excess: self.adversary_set.distance(l),
            });
        }
        Ok(self.payoff.eval(p, l))
    }

    /// Payoff without membership checks, for actions produced by trusted code paths.
    pub fn payoff_unchecked(&self, p: &[f64], l: &[f64]) -> Vec<f64> {
        self.payoff.eval(p, l)
    }

    /// `p*(l)`, always inside `P` (affine responses are clipped).
    pub fn response(&self, l: &[f64]) -> Result<Vec<f64>> {
        if l.len() != self.d_l() {
            return Err(Error::DimensionMismatch { expected: self.d_l(), got: l.len() });
        }
        let raw = self.response.raw(l)?;
        if raw.len() != self.d_p() {
            return Err(Error::DimensionMismatch { expected: self.d_p(), got: raw.len() });
        }
        Ok(match self.response {
            ResponseFunction::Affine { .. } => self.player_set.project(&raw),
            _ => raw,
        })
    }

    /// `u(p*(l), l)`.
    pub fn ideal_payoff(&self, l: &[f64]) -> Result<Vec<f64>> {
        let p = self.response(l)?;
        Ok(self.payoff.eval(&p, l))
    }

    /// `<lambda, u(p, l)>`.
    pub fn directional(&self, lambda: &[f64], p: &[f64], l: &[f64]) -> f64 {
        dot(lambda, &self.payoff.eval(p, l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Dimension,
    Isotropy,
    PayoffBound,
    ResponseCoverage,
    ResponseOutsidePlayerSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: Vec<f64>,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Sampling-based check of the standing assumptions: isotropic `P`, `||u|| <= 1`,
/// and a response that covers `L` and lands in `P`. Violations are reported with
/// their worst witness; nothing here fails.
pub fn validate_instance(instance: &GameInstance, samples: usize, seed: u64) -> ValidationReport {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ValidationReport::default();
    let tol = MEMBERSHIP_TOL;

    let mut shape_ok = true;
    for set in [&instance.player_set, &instance.adversary_set] {
        if let Err(e) = set.check_shape() {
            shape_ok = false;
            report.violations.push(Violation {
                kind: ViolationKind::Dimension,
                witness: vec![],
                value: 0.0,
                detail: e.to_string(),
            });
        }
    }
    if let Err(e) = instance.payoff.clone().normalize(instance.d_p(), instance.d_l()) {
        shape_ok = false;
        report.violations.push(Violation {
            kind: ViolationKind::Dimension,
            witness: vec![],
            value: 0.0,
            detail: e.to_string(),
        });
    }
    if !shape_ok {
        return report;
    }

    // isotropy of P: 1 <= sigma_P(dir) <= d_P on sampled unit directions
    let d_p = instance.d_p();
    let mut worst_low: Option<(f64, Vec<f64>)> = None;
    let mut worst_high: Option<(f64, Vec<f64>)> = None;
    let mut dirs: Vec<Vec<f64>> = (0..d_p)
        .flat_map(|i| {
            let mut e = vec![0.0; d_p];
            e[i] = 1.0;
            let neg = vector::scale(&e, -1.0);
            [e, neg]
        })
        .collect();
    dirs.extend((0..samples).map(|_| random_direction(d_p, &mut rng)));
    for dir in dirs {
        let s = instance.player_set.support(&dir);
        if s < 1.0 - tol && worst_low.as_ref().is_none_or(|(w, _)| s < *w) {
            worst_low = Some((s, dir.clone()));
        }
        if s > d_p as f64 + tol && worst_high.as_ref().is_none_or(|(w, _)| s > *w) {
            worst_high = Some((s, dir));
        }
    }
    if let Some((s, dir)) = worst_low {
        report.violations.push(Violation {
            kind: ViolationKind::Isotropy,
            witness: dir,
            value: s,
            detail: format!("support {s} < 1: P does not contain the unit ball"),
        });
    }
    if let Some((s, dir)) = worst_high {
        report.violations.push(Violation {
            kind: ViolationKind::Isotropy,
            witness: dir,
            value: s,
            detail: format!("support {s} > d_P: P leaves the ball of radius d_P"),
        });
    }

    // payoff bound: bi-affine norm maxima sit at extreme-point pairs
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    match (instance.player_set.vertices(), instance.adversary_set.vertices()) {
        (Some(pv), Some(lv)) if pv.len() * lv.len() <= 1_000_000 => {
            for p in &pv {
                for l in &lv {
                    pairs.push((p.clone(), l.clone()));
                }
            }
        }
        _ => {}
    }
    for _ in 0..samples {
        pairs.push((
            instance.player_set.sample_extreme(&mut rng),
            instance.adversary_set.sample_extreme(&mut rng),
        ));
    }
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for (p, l) in &pairs {
        let n = norm(&instance.payoff.eval(p, l));
        if n > 1.0 + tol && worst.as_ref().is_none_or(|(w, _)| n > *w) {
            worst = Some((n, p.iter().chain(l).copied().collect()));
        }
    }
    if let Some((n, w)) = worst {
        report.violations.push(Violation {
            kind: ViolationKind::PayoffBound,
            witness: w,
            value: n,
            detail: format!("||u(p, l)|| = {n} > 1 at (p, l) = witness"),
        });
    }

    // response coverage and range
    let mut ls: Vec<Vec<f64>> = instance.adversary_set.vertices().unwrap_or_default();
    ls.truncate(samples.max(1));
    ls.extend((0..samples).map(|_| instance.adversary_set.sample(&mut rng)));
    let mut uncovered = None;
    let mut outside = None;
    for l in ls {
        match instance.response(&l) {
            Err(_) => {
                if uncovered.is_none() {
                    uncovered = Some(l);
                }
            }
            Ok(p) => {
                if !instance.player_set.contains(&p, tol) && outside.is_none() {
                    outside = Some((instance.player_set.distance(&p), l));
                }
            }
        }
    }
    if let Some(l) = uncovered {
        report.violations.push(Violation {
            kind: ViolationKind::ResponseCoverage,
            witness: l,
            value: 0.0,
            detail: "no response cell covers this adversary action".into(),
        });
    }
    if let Some((d, l)) = outside {
        report.violations.push(Violation {
            kind: ViolationKind::ResponseOutsidePlayerSet,
            witness: l,
            value: d,
            detail: format!("response lands {d} outside P"),
        });
    }
    report
}

/// Incremental mean of vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningAverage<T: Scalar> {
    pub count: usize,
    pub mean: Vec<T>,
}

impl<T: Scalar> RunningAverage<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![T::zero(); dim],
        }
    }

    pub fn push(&mut self, v: &[T]) {
        self.count += 1;
        let inv = T::one() / T::from_usize(self.count).unwrap();
        for (m, &x) in self.mean.iter_mut().zip(v) {
            *m += (x - *m) * inv;
        }
    }
}
