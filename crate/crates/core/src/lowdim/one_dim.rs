use crate::adversaries::Adversary;
use crate::framework::{RoundRecord, Transcript};
use crate::game::GameInstance;
use crate::learners::ExpertOracle;
use crate::vector;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct OneDimReport {
    pub transcript: Transcript,
    /// Target fixed after the first round.
    pub target: f64,
    /// Rounds (0-based) at which the inner learner restarted.
    pub resets: Vec<usize>,
    /// `|u_bar_T - c|`.
    pub dist_to_target: f64,
}

/// Sign-switching learner for scalar payoffs over the finite action list `actions`.
///
/// Round 0 plays `actions[0]` and fixes `c = u(p*(l_0), l_0)`. Afterwards the sign
/// `s_t = sign(u_bar_{t-1} - c)` (0 keeps the previous sign) scales the expert losses
/// `s_t u(p, l_t)`, and the experts restart whenever the sign flips.
pub fn run_one_dim(instance: &GameInstance, adversary: &Adversary, actions: &[Vec<f64>]) -> Result<OneDimReport> {
    if instance.d() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: instance.d() });
    }
    if actions.is_empty() {
        return Err(Error::Config("one-dimensional learner needs at least one action".into()));
    }
    for a in actions {
        if a.len() != instance.d_p() {
            return Err(Error::DimensionMismatch { expected: instance.d_p(), got: a.len() });
        }
    }
    let horizon = adversary.horizon();
    let mut transcript = Transcript::default();
    let mut oracle = ExpertOracle::new(actions.len(), horizon);
    let mut resets = Vec::new();
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut target = 0.0;

    for t in 0..horizon {
        let mut reset = false;
        let p = if t == 0 {
            actions[0].clone()
        } else {
            let diff = sum / t as f64 - target;
            let s = if diff > 0.0 {
                1.0
            } else if diff < 0.0 {
                -1.0
            } else {
                sign
            };
            if s != sign {
                oracle = ExpertOracle::new(actions.len(), horizon);
                resets.push(t);
                reset = true;
            }
            sign = s;
            vector::combine(actions, &oracle.weights())
        };
        let ell = adversary.next_loss(&transcript.rounds)?;
        let u = instance.payoff(&p, &ell)?;
        if t == 0 {
            target = instance.ideal_payoff(&ell)?[0];
        } else {
            let losses: Vec<f64> = actions.iter().map(|a| sign * instance.payoff_unchecked(a, &ell)[0]).collect();
            oracle.update(&losses)?;
        }
        sum += u[0];
        let mut rec = RoundRecord::new(t, p, ell, u);
        rec.sign = Some(sign);
        rec.reset = Some(reset);
        transcript.rounds.push(rec);
    }
    let dist_to_target = (sum / horizon.max(1) as f64 - target).abs();
    Ok(OneDimReport { transcript, target, resets, dist_to_target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{AdversarySpec, Mixing, Polytope, Script};
    use crate::instances;

    fn grid(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|k| vec![-1.0 + 2.0 * k as f64 / (n - 1) as f64]).collect()
    }

    #[test]
    fn constant_adversary_converges() {
        let g = instances::threshold_1d();
        let spec = AdversarySpec::StrictPolytope {
            polytope: Polytope { vertices: vec![vec![0.3]], mixing: Mixing::Dirichlet },
            seed: 0,
        };
        let adv = spec.instantiate(4096, 0, &g.adversary_set).unwrap();
        let r = run_one_dim(&g, &adv, &grid(16)).unwrap();
        assert_eq!(r.target, g.ideal_payoff(&[0.3]).unwrap()[0]);
        assert!(r.dist_to_target < 0.1, "{}", r.dist_to_target);
        // sign constant between resets
        let rounds = &r.transcript.rounds;
        for w in rounds.windows(2) {
            if w[1].reset == Some(false) {
                assert_eq!(w[0].sign, w[1].sign);
            }
        }
    }

    #[test]
    fn flat_payoff_never_resets() {
        // u(p, 1) = p / 2 with the single action p = 1: u_bar stays at c
        let g = instances::threshold_1d();
        let adv = AdversarySpec::Threshold1D.instantiate(200, 0, &g.adversary_set).unwrap();
        let r = run_one_dim(&g, &adv, &[vec![1.0]]).unwrap();
        assert!(r.resets.is_empty());
        assert_eq!(r.dist_to_target, 0.0);
        assert!(r.transcript.rounds.iter().all(|x| x.sign == Some(1.0)));
    }

    #[test]
    fn alternating_resets_are_sublinear() {
        let g = instances::threshold_1d();
        let spec = AdversarySpec::AdaptiveScript { script: Script::Alternating { a: vec![-0.8], b: vec![0.9] }, seed: 0 };
        let adv = spec.instantiate(4096, 0, &g.adversary_set).unwrap();
        let r = run_one_dim(&g, &adv, &grid(16)).unwrap();
        assert!((r.resets.len() as f64) <= 4.0 * 4096f64.sqrt(), "{}", r.resets.len());
    }

    #[test]
    fn needs_scalar_payoff() {
        let g = instances::bilinear_2d();
        let adv = AdversarySpec::Threshold1D.instantiate(2, 0, &g.adversary_set).unwrap();
        assert!(matches!(run_one_dim(&g, &adv, &[vec![0.0, 0.0]]), Err(Error::DimensionMismatch { .. })));
    }
}
