//! Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero if any
//! criterion fails. Runs every shipped config, so build it optimized.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use approach_lab::geometry::{offmax, offmax_subset_monotonicity_check, q_int_membership, trimmed_region};
use approach_lab::harness::{fit_rate, grid_actions, metrics_csv, run_matrix, ExperimentConfig, LearnerSpec, MetricsRow, SEED_OFFSET_VAR};
use approach_lab::lowdim::run_one_dim;
use approach_lab::{Hull2D, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

struct Run {
    config: ExperimentConfig,
    rows: Vec<MetricsRow>,
    elapsed: Duration,
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_all() -> BTreeMap<String, Run> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .expect("configs directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let config = ExperimentConfig::from_path(&p).unwrap();
        let start = Instant::now();
        let rows = run_matrix(&config, workers(), 0, Some(&configs_dir())).unwrap();
        let elapsed = start.elapsed();
        for r in &rows {
            assert!(r.error.is_none(), "{} T={} seed={}: {:?}", r.config_id, r.horizon, r.seed, r.error);
        }
        out.insert(config.id.clone(), Run { config, rows, elapsed });
    }
    out
}

/// Mean of `f` over seeds, per horizon.
fn means(rows: &[MetricsRow], f: impl Fn(&MetricsRow) -> Option<f64>) -> Vec<(usize, f64)> {
    let mut by_t: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows {
        if let Some(v) = f(r) {
            by_t.entry(r.horizon).or_default().push(v);
        }
    }
    by_t.into_iter().map(|(t, v)| (t, v.iter().sum::<f64>() / v.len() as f64)).collect()
}

fn run<'a>(runs: &'a BTreeMap<String, Run>, id: &str) -> &'a Run {
    runs.get(id).unwrap_or_else(|| panic!("missing shipped config {id}"))
}

fn is_strict(config: &ExperimentConfig) -> Option<bool> {
    match &config.learner {
        LearnerSpec::Preset { name } => Some(name.starts_with("strict")),
        _ => None,
    }
}

// ---- independent oracles -------------------------------------------------------------

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Point-in-hull by brute force: `x` is outside iff some line through a pair of points
/// (or the single point, or the segment) separates it.
fn in_hull_brute(x: [f64; 2], pts: &[[f64; 2]]) -> bool {
    const TOL: f64 = 1e-12;
    match pts.len() {
        0 => false,
        1 => (x[0] - pts[0][0]).abs() <= TOL && (x[1] - pts[0][1]).abs() <= TOL,
        _ => {
            // monotone chain hull
            let mut p = pts.to_vec();
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            p.dedup();
            if p.len() == 1 {
                return in_hull_brute(x, &p);
            }
            let mut h: Vec<[f64; 2]> = Vec::new();
            for pass in 0..2 {
                let start = h.len();
                let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
                    if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
                for &q in iter {
                    while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0.0 {
                        h.pop();
                    }
                    h.push(q);
                }
                h.pop();
            }
            if h.len() == 2 {
                // segment
                let (a, b) = (h[0], h[1]);
                let len2 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
                let t = ((x[0] - a[0]) * (b[0] - a[0]) + (x[1] - a[1]) * (b[1] - a[1])) / len2;
                return cross(a, b, x).abs() <= TOL * len2.sqrt().max(1.0) && (-TOL..=1.0 + TOL).contains(&t);
            }
            (0..h.len()).all(|i| cross(h[i], h[(i + 1) % h.len()], x) >= -TOL)
        }
    }
}

fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let from = s.last().map_or(0, |&l: &usize| l + 1);
            for i in from..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

// ---- criteria ------------------------------------------------------------------------

fn c1_q_int_enumeration() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut mismatches = 0;
    let mut inside = 0;
    for case in 0..500 {
        let n = rng.gen_range(3..=12);
        let k = rng.gen_range(0..=3usize.min(n - 1));
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        // alternate between a cloud point and a random point near the middle
        let x = if case % 4 == 0 {
            pts[rng.gen_range(0..n)]
        } else {
            [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)]
        };
        let brute = subsets_up_to(n, k).iter().all(|removed| {
            let kept: Vec<[f64; 2]> = (0..n).filter(|i| !removed.contains(i)).map(|i| pts[i]).collect();
            in_hull_brute(x, &kept)
        });
        let cloud = PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap();
        let fast = q_int_membership(&x, &cloud, k).unwrap();
        inside += brute as usize;
        mismatches += (brute != fast) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 30.0,
        format!("{mismatches} mismatches on 500 cases ({inside} inside), {secs:.2}s"),
    )
}

fn c2_helly_counting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut violations = 0;
    let mut halfspaces = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(4..=40);
        let eps: f64 = rng.gen_range(0.0..1.0 / 3.0);
        let k = (eps * n as f64).floor() as usize;
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let cloud = PointCloud::new(pts.clone()).unwrap();
        let region = trimmed_region(&cloud, k).unwrap();
        let verts = region.vertices().unwrap_or_default();
        if verts.is_empty() {
            violations += 1;
            continue;
        }
        // normals of every pair of points plus a uniform fan
        let mut dirs: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
                [a.cos(), a.sin()]
            })
            .collect();
        for a in &pts {
            for b in &pts {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                if dx != 0.0 || dy != 0.0 {
                    dirs.push([-dy, dx]);
                    dirs.push([dy, -dx]);
                }
            }
        }
        for l in dirs {
            // the open halfspace {<l, x> > sigma_region(l)} misses the region
            let sigma = verts.iter().map(|v| l[0] * v[0] + l[1] * v[1]).fold(f64::NEG_INFINITY, f64::max);
            let scale = (l[0] * l[0] + l[1] * l[1]).sqrt();
            let count = pts.iter().filter(|p| l[0] * p[0] + l[1] * p[1] > sigma + 1e-9 * scale).count();
            halfspaces += 1;
            worst = worst.max(count as f64 / (2 * k).max(1) as f64);
            if count > 2 * k {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over {halfspaces} halfspaces, worst count/(2 eps n) = {worst:.3}"),
    )
}

fn c3_offmax() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut failures = 0;
    for _ in 0..10_000 {
        let len = rng.gen_range(1..16);
        // integer values keep every sum exact
        let v: Vec<f64> = (0..len).map(|_| rng.gen_range(-50..=50) as f64).collect();
        let subset: Vec<usize> = (0..len).filter(|_| rng.gen_bool(0.6)).collect();
        let n = rng.gen_range(0..len + 2);
        // independent evaluation by sorting
        let sorted_desc = |xs: &[f64]| {
            let mut s = xs.to_vec();
            s.sort_by(|a, b| b.partial_cmp(a).unwrap());
            s
        };
        let om = |xs: &[f64], m: usize| sorted_desc(xs).get(m).copied().unwrap_or(0.0);
        let sub: Vec<f64> = subset.iter().map(|&i| v[i]).collect();
        let mono = om(&sub, n) >= om(&v, n + len - sub.len());
        let identity = (0..len).map(|s| om(&v, s)).sum::<f64>() == v.iter().sum::<f64>();
        let agrees = (0..len + 2).all(|m| offmax(&v, m) == om(&v, m));
        if !(mono && identity && agrees && offmax_subset_monotonicity_check(&v, &subset, n)) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} failures on 10000 cases"))
}

fn c4_audit(runs: &BTreeMap<String, Run>) -> Outcome {
    let mut total = 0;
    let mut audited = 0;
    for r in runs.values() {
        for row in &r.rows {
            if row.details.epochs.is_some() {
                audited += 1;
                total += row.details.audit_violations;
            }
        }
    }
    outcome(total == 0, format!("{total} violations over {audited} epoch-learner runs"))
}

/// Bound check `mean(T) <= mean(T0) (T0/T)^rate * 1.5` plus the slope requirement.
fn rate_check(rows: &[MetricsRow], rate: f64, max_slope: f64) -> (bool, String) {
    let m = means(rows, |r| r.dist_truth);
    let (t0, d0) = m[0];
    let mut ok = true;
    for &(t, d) in &m[1..] {
        let bound = d0 * (t0 as f64 / t as f64).powf(rate) * 1.5;
        ok &= d <= bound;
    }
    let curve: Vec<String> = m.iter().map(|(t, d)| format!("{t}:{d:.2e}")).collect();
    match fit_rate(&m) {
        Ok(fit) => (
            ok && fit.slope <= max_slope,
            format!("slope {:.3} (r2 {:.2}), means {}", fit.slope, fit.r2, curve.join(" ")),
        ),
        Err(e) => (false, format!("no fit: {e}; means {}", curve.join(" "))),
    }
}

fn c5_strict_eff(runs: &BTreeMap<String, Run>) -> Outcome {
    let r = run(runs, "strict_eff_triangle");
    let (ok, detail) = rate_check(&r.rows, 0.25, -0.20);
    let secs = r.elapsed.as_secs_f64();
    outcome(ok && secs < 300.0, format!("{detail}, {secs:.1}s"))
}

fn c6_strict_fast(runs: &BTreeMap<String, Run>) -> Outcome {
    let r = run(runs, "strict_fast_interval");
    let (ok, detail) = rate_check(&r.rows, 1.0 / 3.0, -0.25);
    let path = r.rows.iter().filter_map(|x| x.details.max_path_length).fold(0.0, f64::max);
    outcome(ok && path <= 2.0, format!("{detail}, max path length {path:.3}"))
}

fn c7_err_sign(runs: &BTreeMap<String, Run>) -> Outcome {
    let mut strict_worst = f64::NEG_INFINITY;
    let mut sto_slack = f64::INFINITY;
    let mut ok = true;
    for r in runs.values() {
        let Some(strict) = is_strict(&r.config) else { continue };
        let d_p = r.config.instance.load(Some(&configs_dir())).unwrap().d_p() as f64;
        for row in &r.rows {
            let err = row.err_max.unwrap();
            if strict {
                strict_worst = strict_worst.max(err);
                ok &= err <= 1e-6;
            } else {
                let l = row.details.epochs.unwrap() as f64;
                let bound = 2.0 * r.config.epsilon * d_p * l + 0.01;
                sto_slack = sto_slack.min(bound - err);
                ok &= err <= bound;
            }
        }
    }
    outcome(ok, format!("strict max err {strict_worst:.2e}, statistical min slack {sto_slack:.3}"))
}

fn c8_robustness(runs: &BTreeMap<String, Run>) -> Outcome {
    let strict = run(runs, "strict_eff_triangle");
    let m = means(&strict.rows, |r| r.dist_truth);
    let (t0, d0) = m[0];
    // constant of the strict T^{-1/4} curve, calibrated at its first horizon
    let k = d0 * (t0 as f64).powf(0.25);
    let r = run(runs, "sto_eff_contaminated");
    let d_p = r.config.instance.load(Some(&configs_dir())).unwrap().d_p() as f64;
    let eps = r.config.epsilon;
    let mut ok = eps == 0.01 && d_p == 2.0 && r.config.horizons == [1 << 14];
    let dist = means(&r.rows, |x| x.dist_truth)[0].1;
    let bound = k * (16384f64).powf(-0.25) + 3.0 * k * (eps * d_p).cbrt();
    ok &= dist <= bound;
    let mut tv_worst = 0.0f64;
    for row in &r.rows {
        let l = row.details.epochs.unwrap() as f64;
        let tv = row.details.tv_max.unwrap();
        tv_worst = tv_worst.max(tv);
        ok &= tv <= 2.0 * eps * d_p * l + 1e-6;
    }
    outcome(ok, format!("dist {dist:.4} <= {bound:.4}, max epoch TV {tv_worst:.4}"))
}

fn c9_path_length(runs: &BTreeMap<String, Run>) -> Outcome {
    let r = run(runs, "sto_fast_prefix_outliers");
    let d_p = r.config.instance.load(Some(&configs_dir())).unwrap().d_p() as f64;
    let mut ok = true;
    let mut worst = 0.0f64;
    for row in &r.rows {
        let bound = 4.0 * (r.config.epsilon * d_p * row.horizon as f64 + 2.0);
        let p = row.details.best_path_length.unwrap();
        worst = worst.max(p / bound);
        ok &= p <= bound;
    }
    outcome(ok, format!("worst best-path / bound = {worst:.3}"))
}

fn c10_lower_bound(runs: &BTreeMap<String, Run>) -> Outcome {
    let r = run(runs, "basis_sign8");
    let m = means(&r.rows, |x| x.dist_truth)[0].1;
    let secs = r.elapsed.as_secs_f64();
    let ok = r.rows.len() == 100 && m >= 0.5 && secs < 10.0;
    outcome(ok, format!("mean dist {m:.3} over {} seeds, {secs:.2}s", r.rows.len()))
}

fn c11_one_dim(runs: &BTreeMap<String, Run>) -> Outcome {
    let r = run(runs, "one_dim_affine");
    let instance = r.config.instance.load(Some(&configs_dir())).unwrap();
    let LearnerSpec::OneDim { count, .. } = &r.config.learner else {
        return outcome(false, "one_dim_affine does not use the one-dimensional learner");
    };
    let actions = grid_actions(&instance, *count).unwrap();
    let mut ok = actions.len() == 16;
    let mut worst = 0.0f64;
    let mut invariant_breaks = 0;
    let mut resets = 0;
    for k in 12..=16 {
        let t = 1usize << k;
        for &seed in &r.config.seeds {
            let adv = r.config.adversary.instantiate(t, seed, &instance.adversary_set).unwrap();
            let rep = run_one_dim(&instance, &adv, &actions).unwrap();
            let bound = 2.0 * ((actions.len() as f64).ln() / t as f64).sqrt();
            worst = worst.max(rep.dist_to_target / bound);
            ok &= rep.dist_to_target <= bound;
            resets += rep.resets.len();
            // at every later non-reset round: the sign is unchanged and s_t (u_bar_{t-1} - c) >= 0
            let rounds = &rep.transcript.rounds;
            let mut sum = rounds[0].u[0];
            for t in 1..rounds.len() {
                let (prev, cur) = (&rounds[t - 1], &rounds[t]);
                if cur.reset == Some(false) {
                    let side = cur.sign.unwrap() * (sum / t as f64 - rep.target);
                    if prev.sign != cur.sign || side < -1e-9 {
                        invariant_breaks += 1;
                    }
                }
                sum += cur.u[0];
            }
        }
    }
    ok &= invariant_breaks == 0;
    outcome(ok, format!("worst dist/bound {worst:.3}, {invariant_breaks} invariant breaks, {resets} resets"))
}

fn c12_two_dim(runs: &BTreeMap<String, Run>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let t = 100_000;
    let mut hull = Hull2D::new();
    let mut total = 0.0;
    for _ in 0..t {
        // uniform in the unit disk
        let (r, a): (f64, f64) = (rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * std::f64::consts::PI));
        total += hull.insert([r * a.cos(), r * a.sin()]);
    }
    let bound = 20.0 * (t as f64).sqrt();
    let r = run(runs, "two_dim_triangle");
    let m = means(&r.rows, |x| x.dist_truth);
    let in_range = m.iter().all(|(t, _)| (1 << 10..=1 << 14).contains(t));
    match fit_rate(&m) {
        Ok(fit) => outcome(
            total <= bound && in_range && fit.slope <= -0.40,
            format!("cumulative hull distance {total:.2} <= {bound:.1}, learner slope {:.3}", fit.slope),
        ),
        Err(e) => outcome(false, format!("cumulative hull distance {total:.2}, no fit: {e}")),
    }
}

fn c13_decomposition(runs: &BTreeMap<String, Run>) -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    for r in runs.values() {
        for row in &r.rows {
            if row.dist_truth.is_some() && row.details.decomposition_bound.is_some() {
                checked += 1;
                violations += !row.decomposition_holds(0.05) as usize;
            }
        }
    }
    outcome(violations == 0 && checked > 0, format!("{violations} violations over {checked} runs"))
}

fn c14_reproducible(runs: &BTreeMap<String, Run>) -> Outcome {
    let exe = env!("CARGO_BIN_EXE_approach-lab");
    let out = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for (id, r) in runs {
        let dir = out.path().join(id);
        let path = configs_dir().join(format!("{id}.json"));
        let status = Command::new(exe)
            .env_remove(SEED_OFFSET_VAR)
            .args(["run", "--config"])
            .arg(&path)
            .arg("--workers")
            .arg(workers().to_string())
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        let first = metrics_csv(&r.rows).unwrap();
        let second = std::fs::read(dir.join("metrics.csv")).unwrap_or_default();
        if !status.status.success() || first != second {
            differing.push(id.clone());
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} configs compared, differing: {:?}", runs.len(), differing),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "q_int matches subset enumeration", c1_q_int_enumeration()),
        (2, "Helly halfspace counting", c2_helly_counting()),
        (3, "offmax monotonicity and summation", c3_offmax()),
    ];
    let start = Instant::now();
    let runs = run_all();
    eprintln!("shipped matrix ran in {:.1}s", start.elapsed().as_secs_f64());
    results.push((4, "valid-loss audit", c4_audit(&runs)));
    results.push((5, "strict efficient rate", c5_strict_eff(&runs)));
    results.push((6, "strict fast rate", c6_strict_fast(&runs)));
    results.push((7, "err term sign", c7_err_sign(&runs)));
    results.push((8, "statistical robustness", c8_robustness(&runs)));
    results.push((9, "offset-max path length", c9_path_length(&runs)));
    results.push((10, "lower bound on basis_sign8", c10_lower_bound(&runs)));
    results.push((11, "one-dimensional rate", c11_one_dim(&runs)));
    results.push((12, "two-dimensional rate and hull sum", c12_two_dim(&runs)));
    results.push((13, "decomposition audit", c13_decomposition(&runs)));
    results.push((14, "byte-identical metrics.csv", c14_reproducible(&runs)));

    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name}: {}", o.detail);
        failed += !o.pass as usize;
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
