//! Harness checks: rate fits, distance measurement, output round trips and the
//! relation between the reported distance columns.

use approach_lab::adversaries::{AdversarySpec, Mixing, Polytope};
use approach_lab::framework::{preset, run_epoch_learner};
use approach_lab::geometry::dist_via_support;
use approach_lab::harness::{
    fit_rate, measure_distance, metrics_csv, read_metrics_csv, run_matrix, ExperimentConfig, MetricsRow,
};
use approach_lab::{instances, Error, PointCloud, Tolerances};
use proptest::prelude::*;

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).unwrap()
}

const STRICT: &str = r#"{
    "id": "small",
    "instance": "anchored2",
    "adversary": {"type": "strict_polytope", "vertices": [[0.3, 0.2], [0.6, 0.3], [0.4, 0.6]], "seed": 2},
    "learner": {"kind": "preset", "name": "strict_eff"},
    "horizons": [256, 1024],
    "seeds": [1, 2, 3]
}"#;

#[test]
fn fit_recovers_exact_power_laws() {
    let ts = [1usize << 10, 1 << 12, 1 << 14, 1 << 16];
    let pts: Vec<(usize, f64)> = ts.iter().map(|&t| (t, (t as f64).powf(-0.5))).collect();
    let f = fit_rate(&pts).unwrap();
    assert!((f.slope + 0.5).abs() <= 1e-9);
    assert!((f.r2 - 1.0).abs() <= 1e-12);
    let pts: Vec<(usize, f64)> = ts.iter().map(|&t| (t, 3.0 * (t as f64).powf(-0.25))).collect();
    let f = fit_rate(&pts).unwrap();
    assert!((f.slope + 0.25).abs() <= 1e-9);
    assert!((f.intercept - 3f64.ln()).abs() <= 1e-9);
    assert!(matches!(fit_rate(&pts[..2]), Err(Error::TooFewPoints { .. })));
}

#[test]
fn interval_distance() {
    let model = PointCloud::from_scalars(&[-1.0, 0.2]);
    let d = measure_distance(&[0.4], &model, &Tolerances::default()).unwrap();
    assert!((d - 0.2).abs() <= 1e-12);
    assert_eq!(measure_distance(&[0.2], &model, &Tolerances::default()).unwrap(), 0.0);
}

/// The primal hull distance and the support-function dual agree on the final averages
/// of 100 short runs.
#[test]
fn measured_distance_matches_dual() {
    let spec = AdversarySpec::StrictPolytope {
        polytope: Polytope { vertices: vec![vec![0.3, 0.2], vec![0.6, 0.3], vec![0.4, 0.6]], mixing: Mixing::Dirichlet },
        seed: 6,
    };
    let mut positive = 0;
    for (k, name) in ["anchored2", "bilinear2"].iter().enumerate() {
        let g = instances::builtin(name).unwrap();
        let gt = spec.ground_truth_targets(&g).unwrap();
        for seed in 0..50 {
            let t = 64 + 32 * (seed as usize % 4);
            let cfg = preset("strict_eff", t, 2, 0.0).unwrap();
            let adv = spec.instantiate(t, seed, &g.adversary_set).unwrap();
            let tr = run_epoch_learner(&g, &adv, &cfg, seed).unwrap();
            // push the average outside the target so the check is not all zeros
            let mut u = tr.final_average().unwrap();
            u[k] -= 0.05 * (seed % 3) as f64;
            let primal = measure_distance(&u, &gt.s_model, &Tolerances::default()).unwrap();
            let dual = dist_via_support(&u, &gt.s_model, 4096).unwrap();
            assert!((primal - dual).abs() <= 1e-4, "{name} seed {seed}: {primal} vs {dual}");
            positive += (primal > 1e-6) as usize;
        }
    }
    assert!(positive >= 50, "{positive}");
}

#[test]
fn empirical_target_sits_inside_truth() {
    let c = config(STRICT);
    for r in run_matrix(&c, 2, 0, None).unwrap() {
        let (emp, truth) = (r.dist_empirical.unwrap(), r.dist_truth.unwrap());
        assert!(emp >= 0.0 && truth >= 0.0);
        assert!(emp <= truth + r.details.mesh.unwrap(), "T={} seed={}: {emp} > {truth}", r.horizon, r.seed);
    }
}

#[test]
fn matrix_is_deterministic_and_round_trips() {
    let c = config(STRICT);
    let a = run_matrix(&c, 1, 0, None).unwrap();
    let b = run_matrix(&c, 3, 0, None).unwrap();
    assert_eq!(a.len(), 6);
    let csv = metrics_csv(&a).unwrap();
    assert_eq!(csv, metrics_csv(&b).unwrap());
    let back = read_metrics_csv(&csv).unwrap();
    assert_eq!(metrics_csv(&back).unwrap(), csv);
}

#[test]
fn seed_offset_shifts_every_seed() {
    let c = config(STRICT);
    let shifted = run_matrix(&c, 1, 10, None).unwrap();
    let mut moved = c.clone();
    moved.seeds = c.seeds.iter().map(|s| s + 10).collect();
    let direct = run_matrix(&moved, 1, 0, None).unwrap();
    assert_eq!(metrics_csv(&shifted).unwrap(), metrics_csv(&direct).unwrap());
}

#[test]
fn empty_horizons_give_empty_output() {
    let mut c = config(STRICT);
    c.horizons.clear();
    let rows = run_matrix(&c, 1, 0, None).unwrap();
    assert!(rows.is_empty());
    let csv = String::from_utf8(metrics_csv(&rows).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn basis_sign_rows_stay_far_from_target() {
    let c = config(
        r#"{
        "id": "lower",
        "instance": "basis_sign8",
        "adversary": {"type": "basis_sign", "d": 8, "seed": 1},
        "learner": {"kind": "preset", "name": "strict_eff"},
        "horizons": [8],
        "seeds": [1, 2, 3, 4]
    }"#,
    );
    for r in run_matrix(&c, 1, 0, None).unwrap() {
        assert!((r.dist_truth.unwrap() - 1.0).abs() <= 0.05, "{:?}", r.dist_truth);
    }
}

fn row_strategy() -> impl Strategy<Value = MetricsRow> {
    let opt = || prop::option::of(0.0..10.0f64);
    (1usize..100_000, any::<u64>(), opt(), opt(), opt(), opt(), opt(), opt()).prop_map(
        |(t, seed, a, b, c, d, e, f)| {
            let mut r = MetricsRow::new("cfg", t, seed);
            r.dist_truth = a;
            r.dist_empirical = b;
            r.dist_trimmed = c;
            r.err_max = d.map(|x| -x);
            r.reg_inner = e;
            r.reg_outer = f;
            r
        },
    )
}

proptest! {
    #[test]
    fn csv_round_trips_exactly(rows in prop::collection::vec(row_strategy(), 0..20)) {
        let csv = metrics_csv(&rows).unwrap();
        let back = read_metrics_csv(&csv).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(a.dist_truth, b.dist_truth);
            prop_assert_eq!(a.err_max, b.err_max);
            prop_assert_eq!(a.reg_outer, b.reg_outer);
            prop_assert_eq!((a.horizon, a.seed), (b.horizon, b.seed));
        }
    }
}
