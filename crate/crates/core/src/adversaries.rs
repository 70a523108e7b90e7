//! Loss-sequence generators. Each spec is instantiated for a horizon and run seed;
//! the instance is then a pure function of the transcript prefix.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::framework::RoundRecord;
use crate::game::{flat_dirichlet, ActionSet, GameInstance};
use crate::geometry::{convex_hull_2d, dist_to_hull, PointCloud};
use crate::vector;
use crate::{Error, Result};

/// How a strict adversary mixes the vertices of its polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mixing {
    /// Flat-Dirichlet weights over the vertices.
    #[default]
    Dirichlet,
    /// A uniformly chosen vertex.
    Vertices,
    /// Always the same convex combination.
    Fixed { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub mixing: Mixing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OutlierSampler {
    Fixed { point: Vec<f64> },
    /// Uniform over `L`, rejecting draws inside the base hull.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Script {
    /// All outliers in the first rounds.
    OutliersFirst { base: Polytope, epsilon: f64, outliers: OutlierSampler },
    /// Outliers split evenly over the first rounds of each of `epochs` equal blocks.
    EpochPrefixOutliers { base: Polytope, epsilon: f64, outliers: OutlierSampler, epochs: usize },
    /// `a, b, a, b, ...`
    Alternating { a: Vec<f64>, b: Vec<f64> },
    /// Plays `a` while the running payoff's first coordinate is positive, `b` otherwise.
    Chase { a: Vec<f64>, b: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AdversarySpec {
    StrictPolytope {
        #[serde(flatten)]
        polytope: Polytope,
        #[serde(default)]
        seed: u64,
    },
    Contaminated {
        base: Polytope,
        epsilon: f64,
        outliers: OutlierSampler,
        #[serde(default)]
        seed: u64,
    },
    /// `+-e_t` with fair signs in round `t` (cycling after `d` rounds).
    BasisSign {
        d: usize,
        #[serde(default)]
        seed: u64,
    },
    /// The constant loss 1.
    Threshold1D,
    AdaptiveScript {
        script: Script,
        #[serde(default)]
        seed: u64,
    },
}

/// A spec fixed to a horizon and seed.
#[derive(Debug, Clone)]
pub struct Adversary {
    spec: AdversarySpec,
    horizon: usize,
    seed: u64,
    outlier_rounds: Vec<bool>,
    adversary_set: ActionSet,
}

fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn round_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64 + 1);
    rng
}

impl Polytope {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.mixing {
            Mixing::Dirichlet => {
                let w = flat_dirichlet(self.vertices.len(), rng);
                vector::combine(&self.vertices, &w)
            }
            Mixing::Vertices => self.vertices[rng.gen_range(0..self.vertices.len())].clone(),
            Mixing::Fixed { weights } => vector::combine(&self.vertices, weights),
        }
    }

    fn cloud(&self) -> Result<PointCloud<f64>> {
        PointCloud::new(self.vertices.clone())
    }

    fn check(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Config("adversary polytope needs vertices".into()));
        }
        if let Mixing::Fixed { weights } = &self.mixing {
            crate::geometry::WeightVector::new(weights.clone())?;
            if weights.len() != self.vertices.len() {
                return Err(Error::DimensionMismatch { expected: self.vertices.len(), got: weights.len() });
            }
        }
        self.cloud().map(|_| ())
    }
}

impl OutlierSampler {
    fn draw(&self, base: &Polytope, set: &ActionSet, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            OutlierSampler::Fixed { point } => point.clone(),
            OutlierSampler::Uniform => {
                let cloud = base.cloud().expect("checked polytope");
                for _ in 0..1000 {
                    let x = set.sample(rng);
                    if dist_to_hull(&x, &cloud).unwrap().0 > 1e-6 {
                        return x;
                    }
                }
                loop {
                    let x = set.sample_extreme(rng);
                    if dist_to_hull(&x, &cloud).unwrap().0 > 1e-6 {
                        return x;
                    }
                }
            }
        }
    }
}

impl AdversarySpec {
    /// Outlier fraction, if any.
    pub fn epsilon(&self) -> f64 {
        match self {
            AdversarySpec::Contaminated { epsilon, .. } => *epsilon,
            AdversarySpec::AdaptiveScript {
                script: Script::OutliersFirst { epsilon, .. } | Script::EpochPrefixOutliers { epsilon, .. },
                ..
            } => *epsilon,
            _ => 0.0,
        }
    }

    pub fn instantiate(&self, horizon: usize, run_seed: u64, adversary_set: &ActionSet) -> Result<Adversary> {
        let seed = mix_seed(
            match self {
                AdversarySpec::StrictPolytope { seed, .. }
                | AdversarySpec::Contaminated { seed, .. }
                | AdversarySpec::BasisSign { seed, .. }
                | AdversarySpec::AdaptiveScript { seed, .. } => *seed,
                AdversarySpec::Threshold1D => 0,
            },
            run_seed,
        );
        let mut outlier_rounds = vec![false; horizon];
        let check_outliers = |base: &Polytope, eps: f64, outliers: &OutlierSampler| -> Result<usize> {
            base.check()?;
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::Config(format!("epsilon {eps} outside [0, 1]")));
            }
            if let OutlierSampler::Fixed { point } = outliers {
                if dist_to_hull(point, &base.cloud()?)?.0 <= 1e-9 {
                    return Err(Error::Config("fixed outlier lies inside the base hull".into()));
                }
            }
            Ok((eps * horizon as f64).floor() as usize)
        };
        match self {
            AdversarySpec::StrictPolytope { polytope, .. } => polytope.check()?,
            AdversarySpec::Contaminated { base, epsilon, outliers, .. } => {
                let k = check_outliers(base, *epsilon, outliers)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for t in sample(&mut rng, horizon, k.min(horizon)).iter() {
                    outlier_rounds[t] = true;
                }
            }
            AdversarySpec::AdaptiveScript { script, .. } => match script {
                Script::OutliersFirst { base, epsilon, outliers } => {
                    let k = check_outliers(base, *epsilon, outliers)?;
                    outlier_rounds[..k.min(horizon)].iter_mut().for_each(|x| *x = true);
                }
                Script::EpochPrefixOutliers { base, epsilon, outliers, epochs } => {
                    let k = check_outliers(base, *epsilon, outliers)?;
                    let blocks = (*epochs).max(1);
                    let len = horizon / blocks;
                    for b in 0..blocks {
                        let share = k / blocks + usize::from(b < k % blocks);
                        for t in 0..share.min(len) {
                            outlier_rounds[b * len + t] = true;
                        }
                    }
                }
                _ => {}
            },
            AdversarySpec::BasisSign { d, .. } => {
                if *d == 0 {
                    return Err(Error::Config("basis-sign dimension must be positive".into()));
                }
            }
            AdversarySpec::Threshold1D => {}
        }
        Ok(Adversary {
            spec: self.clone(),
            horizon,
            seed,
            outlier_rounds,
            adversary_set: adversary_set.clone(),
        })
    }

    /// Declared restriction set `Q` and a sampled model of its ideal-payoff image `S(Q)`.
    pub fn ground_truth_targets(&self, instance: &GameInstance) -> Result<GroundTruth> {
        let base = match self {
            AdversarySpec::StrictPolytope { polytope, .. } => polytope.clone(),
            AdversarySpec::Contaminated { base, .. } => base.clone(),
            AdversarySpec::AdaptiveScript {
                script: Script::OutliersFirst { base, .. } | Script::EpochPrefixOutliers { base, .. },
                ..
            } => base.clone(),
            AdversarySpec::Threshold1D => Polytope { vertices: vec![vec![1.0]], mixing: Mixing::Vertices },
            AdversarySpec::BasisSign { d, .. } => {
                // the target is the image of the played vertices themselves
                let mut verts = Vec::new();
                for i in 0..*d {
                    for s in [1.0, -1.0] {
                        let mut e = vec![0.0; *d];
                        e[i] = s;
                        verts.push(e);
                    }
                }
                let images = verts.iter().map(|v| instance.ideal_payoff(v)).collect::<Result<Vec<_>>>()?;
                return Ok(GroundTruth {
                    q_model: PointCloud::new(verts)?,
                    s_model: compress(images)?,
                    mesh: 0.0,
                });
            }
            AdversarySpec::AdaptiveScript { .. } => return Err(Error::NoGroundTruth),
        };
        base.check()?;
        Ok(GroundTruth {
            q_model: PointCloud::new(base.vertices.clone())?,
            s_model: image_model(instance, &base.vertices, GROUND_TRUTH_MESH)?,
            mesh: GROUND_TRUTH_MESH,
        })
    }
}

/// Grid mesh of ground-truth target models.
pub const GROUND_TRUTH_MESH: f64 = 1e-2;
const SAMPLED_VERTEX_CAP: usize = 256;

/// Sampled model of `conv{u(p*(l), l) : l in conv(vertices)}`: images of the vertices,
/// of a grid with the given mesh and of finer edge samples, reduced to hull vertices
/// in payoff dimension at most two.
pub fn image_model(instance: &GameInstance, vertices: &[Vec<f64>], mesh: f64) -> Result<PointCloud<f64>> {
    if vertices.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let samples = if vertices[0].len() > 2 && vertices.len() > SAMPLED_VERTEX_CAP {
        vertices.to_vec()
    } else {
        hull_samples(vertices, mesh)
    };
    let images = samples.iter().map(|l| instance.ideal_payoff(l)).collect::<Result<Vec<_>>>()?;
    compress(images)
}

/// Ground-truth measurement targets.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub q_model: PointCloud<f64>,
    pub s_model: PointCloud<f64>,
    /// Sampling mesh of the `S(Q)` model over `Q`.
    pub mesh: f64,
}

/// Keeps only the hull vertices of a planar or scalar model.
fn compress(points: Vec<Vec<f64>>) -> Result<PointCloud<f64>> {
    let d = points.first().map_or(0, |p| p.len());
    let pts = match d {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                vec![vec![lo]]
            } else {
                vec![vec![lo], vec![hi]]
            }
        }
        2 => {
            let arr: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            convex_hull_2d(&arr).into_iter().map(|v| v.to_vec()).collect()
        }
        _ => {
            let mut v = points;
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v.dedup();
            v
        }
    };
    PointCloud::new(pts)
}

/// Vertices, a grid of the given mesh inside the hull, and edges sampled ten times
/// finer. Beyond two dimensions, flat-Dirichlet samples stand in for the grid.
pub fn hull_samples(vertices: &[Vec<f64>], mesh: f64) -> Vec<Vec<f64>> {
    let d = vertices[0].len();
    let mut out: Vec<Vec<f64>> = vertices.to_vec();
    match d {
        1 => {
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            let n = ((hi - lo) / (mesh / 10.0)).ceil() as usize;
            for k in 0..=n {
                out.push(vec![lo + (hi - lo) * k as f64 / n.max(1) as f64]);
            }
        }
        2 => {
            let arr: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
            let hull = convex_hull_2d(&arr);
            let m = hull.len();
            if m >= 2 {
                for i in 0..m {
                    let (a, b) = (hull[i], hull[(i + 1) % m]);
                    let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                    let n = (len / (mesh / 10.0)).ceil() as usize;
                    for k in 0..n {
                        let s = k as f64 / n as f64;
                        out.push(vec![a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
                    }
                }
            }
            if m >= 3 {
                let (x0, x1) = hull.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, v| (acc.0.min(v[0]), acc.1.max(v[0])));
                let (y0, y1) = hull.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, v| (acc.0.min(v[1]), acc.1.max(v[1])));
                let inside = |p: [f64; 2]| {
                    (0..m).all(|i| {
                        let (a, b) = (hull[i], hull[(i + 1) % m]);
                        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0.0
                    })
                };
                let mut x = x0;
                while x <= x1 {
                    let mut y = y0;
                    while y <= y1 {
                        if inside([x, y]) {
                            out.push(vec![x, y]);
                        }
                        y += mesh;
                    }
                    x += mesh;
                }
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..10_000 {
                let w = flat_dirichlet(vertices.len(), &mut rng);
                out.push(vector::combine(vertices, &w));
            }
        }
    }
    out
}

impl Adversary {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn spec(&self) -> &AdversarySpec {
        &self.spec
    }

    /// Whether round `t` (0-based) is scheduled as an outlier.
    pub fn is_outlier(&self, t: usize) -> bool {
        self.outlier_rounds.get(t).copied().unwrap_or(false)
    }

    pub fn outlier_count(&self) -> usize {
        self.outlier_rounds.iter().filter(|&&b| b).count()
    }

    /// The loss of round `prefix.len()` (0-based).
    pub fn next_loss(&self, prefix: &[RoundRecord]) -> Result<Vec<f64>> {
        let t = prefix.len();
        if t >= self.horizon {
            return Err(Error::HorizonExceeded(self.horizon));
        }
        let mut rng = round_rng(self.seed, t);
        Ok(match &self.spec {
            AdversarySpec::StrictPolytope { polytope, .. } => polytope.draw(&mut rng),
            AdversarySpec::Contaminated { base, outliers, .. } => {
                if self.outlier_rounds[t] {
                    outliers.draw(base, &self.adversary_set, &mut rng)
                } else {
                    base.draw(&mut rng)
                }
            }
            AdversarySpec::BasisSign { d, .. } => {
                let mut e = vec![0.0; *d];
                e[t % d] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                e
            }
            AdversarySpec::Threshold1D => vec![1.0],
            AdversarySpec::AdaptiveScript { script, .. } => match script {
                Script::OutliersFirst { base, outliers, .. } | Script::EpochPrefixOutliers { base, outliers, .. } => {
                    if self.outlier_rounds[t] {
                        outliers.draw(base, &self.adversary_set, &mut rng)
                    } else {
                        base.draw(&mut rng)
                    }
                }
                Script::Alternating { a, b } => {
                    if t.is_multiple_of(2) {
                        a.clone()
                    } else {
                        b.clone()
                    }
                }
                Script::Chase { a, b } => {
                    let s: f64 = prefix.iter().map(|r| r.u[0]).sum();
                    if s > 0.0 {
                        a.clone()
                    } else {
                        b.clone()
                    }
                }
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn run(adv: &Adversary) -> Vec<Vec<f64>> {
        let mut prefix: Vec<RoundRecord> = Vec::new();
        let mut out = Vec::new();
        for t in 0..adv.horizon() {
            let l = adv.next_loss(&prefix).unwrap();
            prefix.push(RoundRecord::new(t, vec![0.0], l.clone(), vec![0.0]));
            out.push(l);
        }
        out
    }

    fn triangle() -> Polytope {
        Polytope { vertices: vec![vec![0.2, 0.1], vec![0.8, 0.2], vec![0.4, 0.7]], mixing: Mixing::Dirichlet }
    }

    #[test]
    fn singleton_polytope_is_constant() {
        let spec = AdversarySpec::StrictPolytope {
            polytope: Polytope { vertices: vec![vec![0.3, -0.2]], mixing: Mixing::Dirichlet },
            seed: 1,
        };
        let adv = spec.instantiate(20, 0, &ActionSet::ball(2, 1.0)).unwrap();
        assert!(run(&adv).iter().all(|l| (l[0] - 0.3).abs() < 1e-15 && (l[1] + 0.2).abs() < 1e-15));
    }

    #[test]
    fn strict_polytope_stays_inside_and_is_deterministic() {
        let spec = AdversarySpec::StrictPolytope { polytope: triangle(), seed: 4 };
        let adv = spec.instantiate(500, 9, &ActionSet::ball(2, 1.0)).unwrap();
        let a = run(&adv);
        let b = run(&spec.instantiate(500, 9, &ActionSet::ball(2, 1.0)).unwrap());
        assert_eq!(a, b);
        let cloud = PointCloud::new(triangle().vertices).unwrap();
        for l in &a {
            assert!(dist_to_hull(l, &cloud).unwrap().0 <= 1e-12);
        }
        let c = run(&spec.instantiate(500, 10, &ActionSet::ball(2, 1.0)).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn basis_sign_spans_coordinates() {
        let spec = AdversarySpec::BasisSign { d: 4, seed: 3 };
        let adv = spec.instantiate(4, 0, &ActionSet::cube(4, 1.0)).unwrap();
        for (t, l) in run(&adv).iter().enumerate() {
            for (i, v) in l.iter().enumerate() {
                if i == t {
                    assert_eq!(v.abs(), 1.0);
                } else {
                    assert_eq!(*v, 0.0);
                }
            }
        }
        assert!(matches!(adv.next_loss(&vec![RoundRecord::new(0, vec![], vec![], vec![]); 4]), Err(Error::HorizonExceeded(4))));
    }

    #[test]
    fn threshold_constant() {
        let adv = AdversarySpec::Threshold1D.instantiate(5, 0, &ActionSet::cube(1, 2.0)).unwrap();
        assert!(run(&adv).iter().all(|l| l == &vec![1.0]));
        let gt = AdversarySpec::Threshold1D.ground_truth_targets(&instances::threshold_1d()).unwrap();
        // u(p*(1), 1) = 1 * 1 / 2
        assert_eq!(gt.s_model.points(), &[vec![0.5]]);
    }

    #[test]
    fn contamination_is_exact() {
        let spec = AdversarySpec::Contaminated {
            base: triangle(),
            epsilon: 0.03,
            outliers: OutlierSampler::Uniform,
            seed: 2,
        };
        let adv = spec.instantiate(1000, 5, &ActionSet::ball(2, 1.0)).unwrap();
        let cloud = PointCloud::new(triangle().vertices).unwrap();
        let outside = run(&adv).iter().filter(|l| dist_to_hull(l, &cloud).unwrap().0 > 1e-9).count();
        assert_eq!(outside, 30);
        assert_eq!(adv.outlier_count(), 30);
    }

    #[test]
    fn outliers_first_script() {
        let spec = AdversarySpec::AdaptiveScript {
            script: Script::OutliersFirst {
                base: triangle(),
                epsilon: 0.1,
                outliers: OutlierSampler::Fixed { point: vec![-0.8, -0.5] },
            },
            seed: 0,
        };
        let adv = spec.instantiate(50, 0, &ActionSet::ball(2, 1.0)).unwrap();
        let ls = run(&adv);
        assert!(ls[..5].iter().all(|l| l == &vec![-0.8, -0.5]));
        assert!(ls[5..].iter().all(|l| l != &vec![-0.8, -0.5]));
    }

    #[test]
    fn singleton_ground_truth() {
        let spec = AdversarySpec::StrictPolytope {
            polytope: Polytope { vertices: vec![vec![0.3, 0.4]], mixing: Mixing::Dirichlet },
            seed: 0,
        };
        let g = instances::bilinear_2d();
        let gt = spec.ground_truth_targets(&g).unwrap();
        assert_eq!(gt.s_model.len(), 1);
        assert_eq!(gt.s_model.points()[0], g.ideal_payoff(&[0.3, 0.4]).unwrap());
    }

    #[test]
    fn affine_triangle_image_matches_model() {
        // affine response: the image is continuous, so random hull points sit within the mesh
        let g = GameInstance::new(
            ActionSet::cube(2, 1.0),
            ActionSet::cube(2, 1.0),
            crate::game::BiAffinePayoff::bilinear(vec![
                vec![vec![0.5, 0.0], vec![0.0, 0.0]],
                vec![vec![0.0, 0.0], vec![0.0, 0.5]],
            ]),
            crate::game::ResponseFunction::Affine { matrix: vec![vec![1.0, 0.2], vec![-0.3, 1.0]], offset: vec![0.1, 0.0] },
        )
        .unwrap();
        let spec = AdversarySpec::StrictPolytope { polytope: triangle(), seed: 0 };
        let gt = spec.ground_truth_targets(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let w = flat_dirichlet(3, &mut rng);
            let l = vector::combine(&triangle().vertices, &w);
            let u = g.ideal_payoff(&l).unwrap();
            assert!(dist_to_hull(&u, &gt.s_model).unwrap().0 <= gt.mesh);
        }
    }

    #[test]
    fn adaptive_has_no_ground_truth() {
        let spec = AdversarySpec::AdaptiveScript {
            script: Script::Alternating { a: vec![0.1], b: vec![0.2] },
            seed: 0,
        };
        assert!(matches!(spec.ground_truth_targets(&instances::threshold_1d()), Err(Error::NoGroundTruth)));
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = AdversarySpec::Contaminated {
            base: triangle(),
            epsilon: 0.01,
            outliers: OutlierSampler::Fixed { point: vec![-0.8, -0.5] },
            seed: 7,
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<AdversarySpec>(&s).unwrap(), spec);
        let strict = AdversarySpec::StrictPolytope { polytope: triangle(), seed: 1 };
        let s = serde_json::to_string(&strict).unwrap();
        assert_eq!(serde_json::from_str::<AdversarySpec>(&s).unwrap(), strict);
    }
}
