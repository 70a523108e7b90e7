use serde::Serialize;

use crate::{Error, Result};

/// Largest learning rate admitted by the correction term.
pub const MAX_RATE: f64 = 1.0 / 32.0;
const WEIGHT_FLOOR: f64 = 1e-300;
const LOSS_SLACK: f64 = 1e-9;

/// Multi-scale optimistic multiplicative weights.
///
/// Every expert is copied once per learning rate `eta_k` of a doubling grid over
/// `[1/T, max_rate]`, with prior mass proportional to `eta_k^2` across scales. Weights
/// follow optimistic mirror descent with the weighted-entropy
/// regularizer `sum_j w_j ln w_j / eta_j`, optimism `m_t = y_{t-1}` and correction
/// `32 eta_j (y_j - m_j)^2`. The played distribution is the marginal over copies.
#[derive(Debug, Clone, Serialize)]
pub struct ExpertOracle {
    experts: usize,
    rates: Vec<f64>,
    /// Copy `(i, k)` is stored at `k * experts + i`.
    anchor: Vec<f64>,
    played: Vec<f64>,
    optimism: Vec<f64>,
    cumulative: Vec<f64>,
    path_length: Vec<f64>,
    last_loss: Option<Vec<f64>>,
    round: usize,
}

impl ExpertOracle {
    pub fn new(experts: usize, horizon: usize) -> Self {
        Self::with_max_rate(experts, horizon, MAX_RATE)
    }

    /// Rate grid topped at `max_rate`; the correction term of a copy is capped at
    /// `(y - m)^2` once `32 eta` exceeds 1.
    pub fn with_max_rate(experts: usize, horizon: usize, max_rate: f64) -> Self {
        assert!(experts > 0, "expert oracle needs at least one expert");
        assert!(max_rate > 0.0, "learning rate must be positive");
        let mut rates = vec![max_rate];
        let floor = 1.0 / horizon.max(1) as f64;
        while rates.last().unwrap() / 2.0 >= floor {
            let r = rates.last().unwrap() / 2.0;
            rates.push(r);
        }
        // uniform over experts, proportional to eta^2 across scales
        let z: f64 = rates.iter().map(|r| r * r).sum();
        let mut w = Vec::with_capacity(experts * rates.len());
        for r in &rates {
            w.extend(std::iter::repeat_n(r * r / z / experts as f64, experts));
        }
        Self {
            experts,
            rates,
            anchor: w.clone(),
            played: w,
            optimism: vec![0.0; experts],
            cumulative: vec![0.0; experts],
            path_length: vec![0.0; experts],
            last_loss: None,
            round: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.experts
    }

    pub fn is_empty(&self) -> bool {
        self.experts == 0
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Distribution over experts for the current round.
    pub fn weights(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.experts];
        for (j, w) in self.played.iter().enumerate() {
            out[j % self.experts] += w;
        }
        out
    }

    pub fn cumulative_losses(&self) -> &[f64] {
        &self.cumulative
    }

    /// `sum_t |y_{t+1,i} - y_{t,i}|` per expert.
    pub fn path_lengths(&self) -> &[f64] {
        &self.path_length
    }

    pub fn optimism(&self) -> &[f64] {
        &self.optimism
    }

    /// Observes the loss vector of the current round and prepares the next one.
    pub fn update(&mut self, loss: &[f64]) -> Result<()> {
        if loss.len() != self.experts {
            return Err(Error::DimensionMismatch { expected: self.experts, got: loss.len() });
        }
        let mut y = loss.to_vec();
        for v in y.iter_mut() {
            if !(v.abs() <= 1.0 + LOSS_SLACK) {
                return Err(Error::LossOutOfRange { value: *v });
            }
            *v = v.clamp(-1.0, 1.0);
        }
        let n = self.experts;
        let mut g = vec![0.0; self.anchor.len()];
        for (k, &eta) in self.rates.iter().enumerate() {
            for i in 0..n {
                let d = y[i] - self.optimism[i];
                g[k * n + i] = y[i] + (32.0 * eta).min(1.0) * d * d;
            }
        }
        self.anchor = self.mirror_step(&self.anchor, &g);
        let mut m = vec![0.0; self.anchor.len()];
        for k in 0..self.rates.len() {
            m[k * n..(k + 1) * n].copy_from_slice(&y);
        }
        self.played = self.mirror_step(&self.anchor, &m);

        if let Some(prev) = &self.last_loss {
            for i in 0..n {
                self.path_length[i] += (y[i] - prev[i]).abs();
            }
        }
        for i in 0..n {
            self.cumulative[i] += y[i];
        }
        self.optimism = y.clone();
        self.last_loss = Some(y);
        self.round += 1;
        Ok(())
    }

    /// `argmin_w <w, g> + D_psi(w, base)`: `w_j = base_j exp(-eta_j (g_j + mu))` with
    /// `mu` normalizing, found by safeguarded Newton iterations. The normalizer only
    /// depends on per-scale sums, so each iteration costs one term per rate.
    fn mirror_step(&self, base: &[f64], g: &[f64]) -> Vec<f64> {
        let n = self.experts;
        let lo_g = g.iter().copied().fold(f64::INFINITY, f64::min);
        let hi_g = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = Vec::with_capacity(base.len());
        let mut scale_mass = Vec::with_capacity(self.rates.len());
        for (k, &eta) in self.rates.iter().enumerate() {
            let mut s = 0.0;
            for j in k * n..(k + 1) * n {
                let v = base[j] * (-eta * g[j]).exp();
                s += v;
                w.push(v);
            }
            scale_mass.push(s);
        }
        // F(mu) = sum_k S_k exp(-eta_k mu) - 1 is decreasing with a root in [-hi_g, -lo_g]
        let (mut lo, mut hi) = (-hi_g, -lo_g);
        let eval = |mu: f64| -> (f64, f64) {
            let mut f = -1.0;
            let mut df = 0.0;
            for (&eta, &s) in self.rates.iter().zip(&scale_mass) {
                let e = s * (-eta * mu).exp();
                f += e;
                df -= eta * e;
            }
            (f, df)
        };
        // first-order guess: mu = -E_base[g], exact when all rates are equal and small
        let mut mu = (-base.iter().zip(g).map(|(b, x)| b * x).sum::<f64>()).clamp(lo, hi);
        for _ in 0..100 {
            let (f, df) = eval(mu);
            if f.abs() <= 1e-15 {
                break;
            }
            if f > 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            let newton = mu - f / df;
            let next = if df < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            let step = (next - mu).abs();
            mu = next;
            // the final renormalization absorbs whatever residual is left
            if step <= 1e-14 * (1.0 + mu.abs()) || hi - lo <= 1e-16 * (1.0 + mu.abs()) {
                break;
            }
        }
        for (k, &eta) in self.rates.iter().enumerate() {
            let f = (-eta * mu).exp();
            for x in &mut w[k * n..(k + 1) * n] {
                *x = (*x * f).max(WEIGHT_FLOOR);
            }
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }
}
