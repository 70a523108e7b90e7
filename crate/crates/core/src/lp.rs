//! Dense bounded-variable simplex for the small linear programs used by the
//! geometric subroutines (TV-closest means, maximin points, minimax actions).
//!
//! Problems are stated as `min c^T x` subject to row constraints and per-variable
//! bounds `lo <= x <= hi` with finite `lo`. The solver is a two-phase tableau method
//! where nonbasic variables sit at either bound, so box constraints never become rows.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<(Vec<f64>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-11;
const MAX_ITERS: usize = 200_000;

impl LinearProgram {
    /// `n` variables, zero objective, bounds `[0, inf)`.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn minimize(&mut self, c: Vec<f64>) -> &mut Self {
        assert_eq!(c.len(), self.objective.len());
        self.objective = c;
        self
    }

    pub fn bounds(&mut self, j: usize, lo: f64, hi: f64) -> &mut Self {
        assert!(lo.is_finite(), "lower bounds must be finite");
        self.lower[j] = lo;
        self.upper[j] = hi;
        self
    }

    pub fn row(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push((coeffs, cmp, rhs));
        self
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.objective.len();
        let m = self.rows.len();
        for j in 0..n {
            if self.upper[j] < self.lower[j] - 1e-12 {
                return Err(Error::Infeasible(format!("variable {j} has empty bounds")));
            }
        }
        // Column layout: originals | slacks (one per inequality row) | artificials.
        let slack_of: Vec<Option<usize>> = {
            let mut k = n;
            self.rows
                .iter()
                .map(|(_, cmp, _)| match cmp {
                    Cmp::Eq => None,
                    _ => {
                        k += 1;
                        Some(k - 1)
                    }
                })
                .collect()
        };
        let n_slack = slack_of.iter().flatten().count();
        let art0 = n + n_slack;
        let ncols = art0 + m;

        let mut hi = vec![f64::INFINITY; ncols];
        for j in 0..n {
            hi[j] = self.upper[j] - self.lower[j];
        }
        let mut tab = vec![vec![0.0; ncols]; m];
        let mut xb = vec![0.0; m];
        for (i, (coeffs, cmp, rhs)) in self.rows.iter().enumerate() {
            let shift: f64 = coeffs.iter().zip(&self.lower).map(|(a, l)| a * l).sum();
            let mut b = rhs - shift;
            let row = &mut tab[i];
            row[..n].copy_from_slice(coeffs);
            if let Some(s) = slack_of[i] {
                row[s] = if *cmp == Cmp::Le { 1.0 } else { -1.0 };
            }
            if b < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
                b = -b;
            }
            row[art0 + i] = 1.0;
            xb[i] = b;
        }
        let basic: Vec<usize> = (art0..art0 + m).collect();
        let mut status = vec![Status::Lower; ncols];
        for &b in &basic {
            status[b] = Status::Basic;
        }
        let mut state = Tableau {
            tab,
            xb,
            basic,
            status,
            hi,
        };

        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(art0) {
            *c = 1.0;
        }
        state.optimize(&phase1, ncols)?;
        let infeas: f64 = state
            .basic
            .iter()
            .zip(&state.xb)
            .filter(|(&b, _)| b >= art0)
            .map(|(_, &v)| v)
            .sum();
        let scale = 1.0 + self.rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if infeas > 1e-7 * scale {
            return Err(Error::Infeasible(format!(
                "phase one residual {infeas:e}"
            )));
        }
        for j in art0..ncols {
            state.hi[j] = 0.0;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for r in 0..m {
            if state.basic[r] >= art0 {
                if let Some(j) = (0..art0).find(|&j| {
                    state.status[j] != Status::Basic && state.tab[r][j].abs() > 1e-8
                }) {
                    state.pivot(r, j);
                    state.basic[r] = j;
                }
            }
        }

        let mut phase2 = vec![0.0; ncols];
        phase2[..n].copy_from_slice(&self.objective);
        state.optimize(&phase2, art0)?;

        let mut x = self.lower.clone();
        for j in 0..n {
            if state.status[j] == Status::Upper {
                x[j] += state.hi[j];
            }
        }
        for (r, &b) in state.basic.iter().enumerate() {
            if b < n {
                x[b] += state.xb[r];
            }
        }
        for j in 0..n {
            x[j] = x[j].clamp(self.lower[j], self.upper[j]);
        }
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}

struct Tableau {
    tab: Vec<Vec<f64>>,
    xb: Vec<f64>,
    basic: Vec<usize>,
    status: Vec<Status>,
    hi: Vec<f64>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let old = self.basic[r];
        let p = self.tab[r][j];
        for v in self.tab[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.tab[r].clone();
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[j] = 0.0;
            }
        }
        self.status[j] = Status::Basic;
        if self.status[old] == Status::Basic {
            self.status[old] = Status::Lower;
        }
    }

    /// Minimizes `cost` over the current feasible basis, entering only columns `< allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let m = self.tab.len();
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_ITERS {
            let bland = degenerate_run > 50;
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..allowed {
                let st = self.status[j];
                if st == Status::Basic || self.hi[j] <= 0.0 {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    let t = self.tab[i][j];
                    if t != 0.0 {
                        d -= cost[self.basic[i]] * t;
                    }
                }
                let dir = match st {
                    Status::Lower if d < -COST_TOL => 1.0,
                    Status::Upper if d > COST_TOL => -1.0,
                    _ => continue,
                };
                let better = match entering {
                    None => true,
                    Some((_, best, _)) => !bland && d.abs() > best,
                };
                if better {
                    entering = Some((j, d.abs(), dir));
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _, dir)) = entering else {
                return Ok(());
            };

            let mut theta = self.hi[j];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..m {
                let a = self.tab[i][j] * dir;
                let b = self.basic[i];
                if a > PIVOT_TOL {
                    let t = (self.xb[i].max(0.0)) / a;
                    if t < theta || (bland && t == theta && leave.is_some_and(|(r, _)| self.basic[r] > b)) {
                        theta = t;
                        leave = Some((i, false));
                    }
                } else if a < -PIVOT_TOL && self.hi[b].is_finite() {
                    let t = ((self.hi[b] - self.xb[i]).max(0.0)) / (-a);
                    if t < theta || (bland && t == theta && leave.is_some_and(|(r, _)| self.basic[r] > b)) {
                        theta = t;
                        leave = Some((i, true));
                    }
                }
            }
            if !theta.is_finite() {
                return Err(Error::Lp("unbounded objective".into()));
            }
            degenerate_run = if theta <= 1e-13 { degenerate_run + 1 } else { 0 };
            for i in 0..m {
                self.xb[i] -= self.tab[i][j] * dir * theta;
            }
            match leave {
                None => {
                    self.status[j] = if dir > 0.0 { Status::Upper } else { Status::Lower };
                }
                Some((r, to_upper)) => {
                    let start = if self.status[j] == Status::Upper { self.hi[j] } else { 0.0 };
                    let old = self.basic[r];
                    self.pivot(r, j);
                    self.basic[r] = j;
                    self.xb[r] = start + dir * theta;
                    self.status[old] = if to_upper { Status::Upper } else { Status::Lower };
                }
            }
        }
        Err(Error::Lp("iteration limit reached".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.minimize(vec![-3.0, -5.0])
            .row(vec![1.0, 0.0], Cmp::Le, 4.0)
            .row(vec![0.0, 2.0], Cmp::Le, 12.0)
            .row(vec![3.0, 2.0], Cmp::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_and_equalities() {
        // min -x - y, x in [0, 1], y in [0, 2], x + y = 2.5
        let mut lp = LinearProgram::new(2);
        lp.minimize(vec![-1.0, -2.0])
            .bounds(0, 0.0, 1.0)
            .bounds(1, 0.0, 2.0)
            .row(vec![1.0, 1.0], Cmp::Eq, 2.5);
        let s = lp.solve().unwrap();
        assert!((s.x[1] - 2.0).abs() < 1e-9);
        assert!((s.x[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn shifted_lower_bounds_and_ge_rows() {
        // min x + y, x >= -3, y >= -1, x + y >= -2
        let mut lp = LinearProgram::new(2);
        lp.minimize(vec![1.0, 1.0])
            .bounds(0, -3.0, f64::INFINITY)
            .bounds(1, -1.0, f64::INFINITY)
            .row(vec![1.0, 1.0], Cmp::Ge, -2.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::new(1);
        lp.bounds(0, 0.0, 1.0).row(vec![1.0], Cmp::Ge, 2.0);
        assert!(matches!(lp.solve(), Err(Error::Infeasible(_))));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(1);
        lp.minimize(vec![-1.0]);
        assert!(matches!(lp.solve(), Err(Error::Lp(_))));
    }

    #[test]
    fn matches_vertex_enumeration_on_random_2d_programs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows: Vec<(f64, f64, f64)> = (0..5)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)))
                .collect();
            let c = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mut lp = LinearProgram::new(2);
            lp.minimize(vec![c.0, c.1]).bounds(0, 0.0, 1.0).bounds(1, 0.0, 1.0);
            for r in &rows {
                lp.row(vec![r.0, r.1], Cmp::Le, r.2);
            }
            let got = lp.solve().unwrap().objective;
            // brute force: all pairwise line intersections (incl. box edges)
            let mut lines: Vec<(f64, f64, f64)> = rows.clone();
            lines.extend([(1.0, 0.0, 0.0), (1.0, 0.0, 1.0), (0.0, 1.0, 0.0), (0.0, 1.0, 1.0)]);
            let feasible = |x: f64, y: f64| {
                (-1e-9..=1.0 + 1e-9).contains(&x)
                    && (-1e-9..=1.0 + 1e-9).contains(&y)
                    && rows.iter().all(|r| r.0 * x + r.1 * y <= r.2 + 1e-9)
            };
            let mut best = f64::INFINITY;
            for i in 0..lines.len() {
                for k in i + 1..lines.len() {
                    let (a1, b1, c1) = lines[i];
                    let (a2, b2, c2) = lines[k];
                    let det = a1 * b2 - a2 * b1;
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (c1 * b2 - c2 * b1) / det;
                    let y = (a1 * c2 - a2 * c1) / det;
                    if feasible(x, y) {
                        best = best.min(c.0 * x + c.1 * y);
                    }
                }
            }
            assert!((got - best).abs() < 1e-8, "lp {got} vs enumeration {best}");
        }
    }
}
