use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    target_eval, EpochRecord, InnerKind, LearnerConfig, LossRule, RoundRecord, RuleTracker, TargetFunction, Transcript,
};
use crate::adversaries::Adversary;
use crate::game::{random_direction, ActionSet, GameInstance};
use crate::geometry::{maximin_generators, minimax_action, AffinePiece, PointCloud};
use crate::learners::{build_cover, CoveringNet, ExpertOracle, Ogd};
use crate::vector::{self, dot, norm};
use crate::{Error, Result};

/// Random actions per epoch checked against the loss lower bound.
pub const AUDIT_ACTIONS: usize = 8;
const AUDIT_TOL: f64 = 1e-9;
/// Top of the expert rate grid. Neighbouring net points differ in loss by about the net
/// resolution per round, so the oracle's default cap of 1/32 is far too sluggish within
/// one short epoch.
pub const INNER_MAX_RATE: f64 = 16.0;

/// Bound on `||grad_p <lambda, u(p, l)>||` implied by `|<lambda, u>| <= 1` on `P`, and
/// the map taking a gradient to the tangent space of `P`.
fn inner_gradient_bound(set: &ActionSet) -> f64 {
    match set {
        ActionSet::Ball { radius, .. } => 1.0 / radius,
        ActionSet::Box { lo, hi } => 2.0 / lo.iter().zip(hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min),
        ActionSet::Simplex { dim } => 2.0 * (*dim as f64).sqrt(),
        ActionSet::Polytope { .. } => {
            let d = set.dim();
            let mut rng = ChaCha8Rng::seed_from_u64(0x6b);
            let mut dirs: Vec<Vec<f64>> = (0..d)
                .map(|j| {
                    let mut e = vec![0.0; d];
                    e[j] = 1.0;
                    e
                })
                .collect();
            if d == 2 {
                let vs = set.vertices().unwrap_or_default();
                for i in 0..vs.len() {
                    let a = &vs[i];
                    let b = &vs[(i + 1) % vs.len()];
                    let n = vec![b[1] - a[1], a[0] - b[0]];
                    if norm(&n) > 0.0 {
                        dirs.push(vector::scale(&n, 1.0 / norm(&n)));
                    }
                }
            }
            dirs.extend((0..2000).map(|_| random_direction(d, &mut rng)));
            let w = dirs
                .iter()
                .map(|u| set.support(u) + set.support(&vector::scale(u, -1.0)))
                .fold(f64::INFINITY, f64::min);
            1.05 * 2.0 / w
        }
    }
}

fn tangent(set: &ActionSet, g: Vec<f64>) -> Vec<f64> {
    match set {
        ActionSet::Simplex { .. } => {
            let m = g.iter().sum::<f64>() / g.len() as f64;
            g.into_iter().map(|x| x - m).collect()
        }
        _ => g,
    }
}

/// Covering-net resolution for an epoch of `epoch_len` rounds.
pub fn default_resolution(d_p: usize, epoch_len: usize) -> f64 {
    1.0 / (d_p as f64 * epoch_len as f64)
}

enum Inner {
    Ogd,
    Experts { net: CoveringNet },
}

/// Sum of `f_t(p)` over the epoch for a fixed action, given the per-round affine
/// coefficients of `p -> <lambda, u(p, l_t)>`.
fn epoch_loss(rule: LossRule, coefs: &[(f64, Vec<f64>)], p: &[f64]) -> (f64, f64) {
    let mut tr = RuleTracker::new(rule);
    let mut total = 0.0;
    let mut path = 0.0;
    let mut prev: Option<f64> = None;
    for (c, b) in coefs {
        let f = tr.push(c + dot(b, p));
        if let Some(q) = prev {
            path += (f - q).abs();
        }
        prev = Some(f);
        total += f;
    }
    (total, path)
}

/// Runs the epoch-based learner against `adversary` for the full horizon.
pub fn run_epoch_learner(
    instance: &GameInstance,
    adversary: &Adversary,
    config: &LearnerConfig,
    seed: u64,
) -> Result<Transcript> {
    config.check()?;
    let sched = config.schedule;
    if adversary.horizon() != sched.horizon {
        return Err(Error::Config(format!(
            "adversary horizon {} differs from schedule horizon {}",
            adversary.horizon(),
            sched.horizon
        )));
    }
    let set = &instance.player_set;
    let d = instance.d();
    let te = sched.epoch_len();
    let inner = match config.inner {
        InnerKind::Ogd => Inner::Ogd,
        InnerKind::Experts { resolution } => {
            let res = resolution.unwrap_or_else(|| default_resolution(instance.d_p(), te));
            Inner::Experts { net: build_cover(set, res)? }
        }
    };
    let g_inner = inner_gradient_bound(set);
    let mut outer = Ogd::new(ActionSet::ball(d, 1.0), vec![0.0; d], 2.0, 2.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = Transcript { schedule: Some(sched), ..Default::default() };

    for e in 0..sched.epochs {
        let lambda = outer.current().to_vec();
        let audit: Vec<Vec<f64>> = (0..AUDIT_ACTIONS).map(|_| set.sample(&mut rng)).collect();
        let mut audit_trackers: Vec<RuleTracker> = audit.iter().map(|_| config.rule.tracker()).collect();
        let mut audit_violations = 0;
        let mut coefs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(te);
        let mut losses: Vec<Vec<f64>> = Vec::with_capacity(te);
        let mut learner_loss = 0.0;

        let mut ogd = Ogd::centered(set.clone(), g_inner);
        let mut experts = match &inner {
            Inner::Experts { net } => Some((
                ExpertOracle::with_max_rate(net.len(), te, INNER_MAX_RATE),
                vec![config.rule.tracker(); net.len()],
                vec![0.0; net.len()],
            )),
            Inner::Ogd => None,
        };

        for t in sched.rounds(e) {
            let p = match (&inner, &experts) {
                (Inner::Experts { net }, Some((oracle, _, _))) => vector::combine(&net.points, &oracle.weights()),
                _ => ogd.current().to_vec(),
            };
            let ell = adversary.next_loss(&transcript.rounds)?;
            let u = instance.payoff(&p, &ell)?;
            let (c, b) = instance.payoff.directional_in_p(&lambda, &ell);

            for (q, tr) in audit.iter().zip(audit_trackers.iter_mut()) {
                let v = c + dot(&b, q);
                if tr.push(v) < v - AUDIT_TOL {
                    audit_violations += 1;
                }
            }

            match (&inner, &mut experts) {
                (Inner::Experts { net }, Some((oracle, trackers, loss))) => {
                    let x = oracle.weights();
                    for (i, pt) in net.points.iter().enumerate() {
                        loss[i] = trackers[i].push(c + dot(&b, pt));
                    }
                    learner_loss += dot(&x, loss);
                    oracle.update(loss)?;
                }
                _ => {
                    learner_loss += c + dot(&b, &p);
                    ogd.step(&tangent(set, b.clone()))?;
                }
            }
            coefs.push((c, b));
            losses.push(ell.clone());
            transcript.rounds.push(RoundRecord::new(t, p, ell, u));
        }

        let cloud = PointCloud::new(losses)?;
        let tv = target_eval(config.target, &cloud, &lambda, instance)?;

        // best audited epoch loss
        let (best, max_path, best_path) = match (&inner, &experts) {
            (Inner::Experts { net }, Some((oracle, _, _))) => {
                let cum = oracle.cumulative_losses();
                let paths = oracle.path_lengths();
                let mut arg = 0;
                for i in 1..cum.len() {
                    if cum[i] < cum[arg] {
                        arg = i;
                    }
                }
                let mut best = cum[arg];
                for q in extra_audit_points(config.target, &cloud, &lambda, &tv.ell_hat, instance)? {
                    best = best.min(epoch_loss(config.rule, &coefs, &q).0);
                }
                let _ = net;
                (best, paths.iter().copied().fold(0.0, f64::max), paths[arg])
            }
            _ => {
                let mut c_sum = 0.0;
                let mut b_sum = vec![0.0; set.dim()];
                for (c, b) in &coefs {
                    c_sum += c;
                    vector::axpy(&mut b_sum, 1.0, b);
                }
                let best = if config.rule.is_linear() {
                    c_sum + set.min_linear(&b_sum)
                } else {
                    epoch_loss(config.rule, &coefs, &set.argmin_linear(&b_sum)).0
                };
                (best, 0.0, 0.0)
            }
        };

        let n = te as f64;
        let mut g = vec![0.0; d];
        for r in &transcript.rounds[sched.rounds(e)] {
            vector::axpy(&mut g, 1.0 / n, &r.u);
        }
        vector::axpy(&mut g, -1.0, &tv.u_star);
        let err_diag = best / n - dot(&lambda, &tv.u_star);

        transcript.epochs.push(EpochRecord {
            epoch: e,
            lambda,
            u_star: tv.u_star,
            ell_hat: tv.ell_hat,
            g: g.clone(),
            inner_regret: learner_loss - best,
            err_diag,
            tv: tv.tv,
            max_path_length: max_path,
            best_path_length: best_path,
            audit_violations,
        });
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        outer.step(&neg)?;
    }
    Ok(transcript)
}

/// Off-net actions audited in the err diagnostic: the ideal response to the epoch
/// target and the minimax action over the target's feasible set.
fn extra_audit_points(
    target: TargetFunction,
    cloud: &PointCloud<f64>,
    lambda: &[f64],
    ell_hat: &[f64],
    instance: &GameInstance,
) -> Result<Vec<Vec<f64>>> {
    let mut out = vec![instance.response(ell_hat)?];
    let gens = if target.is_maximin() {
        maximin_generators(cloud, target.removals())?.0
    } else {
        vec![ell_hat.to_vec()]
    };
    let pieces: Vec<AffinePiece> = gens
        .iter()
        .map(|l| {
            let (a, b) = instance.payoff.directional_in_p(lambda, l);
            AffinePiece { a, b }
        })
        .collect();
    out.push(minimax_action(&instance.player_set, &pieces)?.0);
    Ok(out)
}

/// `(1/T_e) min_p sum_t f_t(p) - <lambda_e, u*_e>` with the minimum over `audit`.
pub fn err_diagnostic(
    transcript: &Transcript,
    epoch: usize,
    rule: LossRule,
    instance: &GameInstance,
    audit: &[Vec<f64>],
) -> Result<f64> {
    let sched = transcript.schedule.ok_or(Error::IncompleteEpoch(epoch))?;
    let range = sched.rounds(epoch);
    if range.end > transcript.rounds.len() || epoch >= transcript.epochs.len() {
        return Err(Error::IncompleteEpoch(epoch));
    }
    let rec = &transcript.epochs[epoch];
    let coefs: Vec<(f64, Vec<f64>)> = transcript.rounds[range.clone()]
        .iter()
        .map(|r| instance.payoff.directional_in_p(&rec.lambda, &r.ell))
        .collect();
    let best = audit
        .iter()
        .map(|p| epoch_loss(rule, &coefs, p).0)
        .fold(f64::INFINITY, f64::min);
    Ok(best / range.len() as f64 - dot(&rec.lambda, &rec.u_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{AdversarySpec, Mixing, Polytope};
    use crate::framework::{preset, EpochSchedule};
    use crate::instances;

    fn constant(l: Vec<f64>) -> AdversarySpec {
        AdversarySpec::StrictPolytope { polytope: Polytope { vertices: vec![l], mixing: Mixing::Dirichlet }, seed: 0 }
    }

    #[test]
    fn strict_eff_constant_adversary() {
        let g = instances::bilinear_2d();
        let cfg = preset("strict_eff", 4096, 2, 0.0).unwrap();
        let adv = constant(vec![0.3, -0.5]).instantiate(4096, 1, &g.adversary_set).unwrap();
        let tr = run_epoch_learner(&g, &adv, &cfg, 1).unwrap();
        assert_eq!(tr.len(), 4096);
        let target = g.ideal_payoff(&[0.3, -0.5]).unwrap();
        let dist = vector::dist(&tr.final_average().unwrap(), &target);
        assert!(dist <= 0.25, "dist {dist}");
        assert!(tr.err_max() <= 1e-6);
        for e in 0..cfg.schedule.epochs {
            let g2 = tr.recompute_g(e).unwrap();
            assert!(vector::dist(&g2, &tr.epochs[e].g) <= 1e-10);
            assert!(norm(&tr.epochs[e].lambda) <= 1.0 + 1e-12);
        }
        assert!(dist <= tr.decomposition_bound() + 1e-9);
    }

    #[test]
    fn single_round_epochs() {
        let g = instances::bilinear_2d();
        let cfg = LearnerConfig {
            schedule: EpochSchedule::new(16, 16).unwrap(),
            rule: LossRule::Linear,
            target: TargetFunction::MeanResponse,
            inner: InnerKind::Ogd,
        };
        let spec = AdversarySpec::StrictPolytope {
            polytope: Polytope { vertices: vec![vec![0.5, 0.0], vec![0.0, 0.5], vec![-0.3, -0.3]], mixing: Mixing::Dirichlet },
            seed: 2,
        };
        let adv = spec.instantiate(16, 0, &g.adversary_set).unwrap();
        let tr = run_epoch_learner(&g, &adv, &cfg, 0).unwrap();
        for (e, rec) in tr.epochs.iter().enumerate() {
            let l = &tr.rounds[e].ell;
            let pstar = g.response(l).unwrap();
            let (c, b) = g.payoff.directional_in_p(&rec.lambda, l);
            let exact = c + g.player_set.min_linear(&b) - dot(&rec.lambda, &g.payoff(&pstar, l).unwrap());
            assert!((rec.err_diag - exact).abs() < 1e-12);
            assert!(rec.err_diag <= 1e-12);
        }
    }

    #[test]
    fn running_max_epoch_run() {
        let g = instances::fast_1d();
        let cfg = preset("strict_fast", 1024, 1, 0.0).unwrap();
        let spec = AdversarySpec::StrictPolytope {
            polytope: Polytope { vertices: vec![vec![-0.2], vec![0.6]], mixing: Mixing::Dirichlet },
            seed: 5,
        };
        let adv = spec.instantiate(1024, 3, &g.adversary_set).unwrap();
        let tr = run_epoch_learner(&g, &adv, &cfg, 3).unwrap();
        assert_eq!(tr.audit_violations(), 0);
        for rec in &tr.epochs {
            assert!(rec.err_diag <= 1e-6, "err {}", rec.err_diag);
            assert!(rec.max_path_length <= 2.0 + 1e-12);
        }
        let audit: Vec<Vec<f64>> = (0..=20).map(|k| vec![-1.0 + 0.1 * k as f64]).collect();
        let e0 = err_diagnostic(&tr, 0, cfg.rule, &g, &audit).unwrap();
        assert!(e0 >= tr.epochs[0].err_diag - 1e-9);
        assert!(matches!(err_diagnostic(&tr, 9999, cfg.rule, &g, &audit), Err(Error::IncompleteEpoch(_))));
    }

    #[test]
    fn horizon_mismatch() {
        let g = instances::fast_1d();
        let cfg = preset("strict_eff", 64, 1, 0.0).unwrap();
        let adv = constant(vec![0.1]).instantiate(32, 0, &g.adversary_set).unwrap();
        assert!(matches!(run_epoch_learner(&g, &adv, &cfg, 0), Err(Error::Config(_))));
    }
}
