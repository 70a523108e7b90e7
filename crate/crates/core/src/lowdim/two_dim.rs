use crate::adversaries::Adversary;
use crate::framework::{RoundRecord, Transcript};
use crate::game::GameInstance;
use crate::geometry::{dist_to_hull, minimax_action, project_to_hull, AffinePiece, Hull2D, PointCloud};
use crate::vector::{self, norm};
use crate::{Error, Result};

/// Convex polytope in payoff space given by generating points.
#[derive(Debug, Clone)]
pub enum PayoffModel {
    Interval { lo: f64, hi: f64 },
    Planar(Hull2D<f64>),
    Cloud(PointCloud<f64>),
}

impl PayoffModel {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyHull)?;
        Ok(match first.len() {
            1 => PayoffModel::Interval {
                lo: points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
                hi: points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max),
            },
            2 => {
                let arr: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
                PayoffModel::Planar(Hull2D::from_points(&arr))
            }
            _ => PayoffModel::Cloud(PointCloud::new(points)?),
        })
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            PayoffModel::Interval { lo, hi } => vec![x[0].clamp(*lo, *hi)],
            PayoffModel::Planar(h) => h.project([x[0], x[1]]).to_vec(),
            PayoffModel::Cloud(c) => project_to_hull(x, c)?,
        })
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            PayoffModel::Interval { lo, hi } => (lo - x[0]).max(x[0] - hi).max(0.0),
            PayoffModel::Planar(h) => h.distance([x[0], x[1]]),
            PayoffModel::Cloud(c) => dist_to_hull(x, c)?.0,
        })
    }
}

/// Images `u(p*(l), l)` of the polygon's vertices and of boundary points spaced at
/// most `resolution` apart.
pub fn target_model(polygon: &[[f64; 2]], instance: &GameInstance, resolution: f64) -> Result<PayoffModel> {
    if polygon.is_empty() {
        return Err(Error::EmptyHull);
    }
    let mut pts = Vec::new();
    let m = polygon.len();
    for i in 0..m {
        let a = polygon[i];
        pts.push(instance.ideal_payoff(&a)?);
        if m == 1 || (m == 2 && i == 1) {
            continue;
        }
        let b = polygon[(i + 1) % m];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let n = (len / resolution).ceil() as usize;
        for k in 1..n {
            let s = k as f64 / n as f64;
            pts.push(instance.ideal_payoff(&[a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])?);
        }
    }
    PayoffModel::new(pts)
}

/// Unit vector from the projection of `u_bar` onto `model` toward `u_bar`; zero
/// inside the model.
pub fn approach_direction(u_bar: &[f64], model: &PayoffModel) -> Result<Vec<f64>> {
    let proj = model.project(u_bar)?;
    let diff = vector::sub(u_bar, &proj);
    let n = norm(&diff);
    Ok(if n <= 1e-12 { vec![0.0; u_bar.len()] } else { vector::scale(&diff, 1.0 / n) })
}

/// `argmin_p max_{l in vertices} <lambda, u(p, l)>`, or the response to the vertex
/// centroid when `lambda = 0`.
pub fn base_approachability_step(lambda: &[f64], vertices: &[Vec<f64>], instance: &GameInstance) -> Result<Vec<f64>> {
    if vertices.is_empty() {
        return Err(Error::EmptyHull);
    }
    if norm(lambda) == 0.0 {
        return instance.response(&vector::mean(vertices).unwrap());
    }
    let pieces: Vec<AffinePiece> = vertices
        .iter()
        .map(|l| {
            let (a, b) = instance.payoff.directional_in_p(lambda, l);
            AffinePiece { a, b }
        })
        .collect();
    Ok(minimax_action(&instance.player_set, &pieces)?.0)
}

#[derive(Debug, Clone)]
pub struct TwoDimReport {
    pub transcript: Transcript,
    /// Final model of the ideal-payoff image of the observed hull.
    pub model: PayoffModel,
    pub hull: Hull2D<f64>,
    /// `dist(u_bar_T, model)`.
    pub total_dist: f64,
    /// `||u_bar_T - u_hat_bar_T||`, the gap caused by playing against projected losses.
    pub projection_error: f64,
    /// `dist(u_hat_bar_T, model)`.
    pub approach_error: f64,
    /// `sum_t dist(l_t, Q_t)`.
    pub cumulative_hull_distance: f64,
}

/// Approachability against the projections of the losses onto the hull of those
/// seen so far.
pub fn run_two_dim(instance: &GameInstance, adversary: &Adversary) -> Result<TwoDimReport> {
    if instance.d_l() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: instance.d_l() });
    }
    let horizon = adversary.horizon();
    let d = instance.d();
    let resolution = 1.0 / (horizon.max(1) as f64).sqrt();
    let mut hull = Hull2D::<f64>::new();
    let mut model: Option<PayoffModel> = None;
    let mut transcript = Transcript::default();
    let mut sum = vec![0.0; d];
    let mut sum_hat = vec![0.0; d];
    let mut cumulative = 0.0;

    for t in 0..horizon {
        let p = match &model {
            None => instance.player_set.center(),
            Some(m) => {
                let u_hat_bar = vector::scale(&sum_hat, 1.0 / t as f64);
                let lambda = approach_direction(&u_hat_bar, m)?;
                let verts: Vec<Vec<f64>> = hull.vertices().iter().map(|v| v.to_vec()).collect();
                base_approachability_step(&lambda, &verts, instance)?
            }
        };
        let ell = adversary.next_loss(&transcript.rounds)?;
        let u = instance.payoff(&p, &ell)?;
        let x = [ell[0], ell[1]];
        let ell_hat = hull.project(x);
        let u_hat = instance.payoff_unchecked(&p, &ell_hat);
        let before = hull.vertices().len();
        let dist = hull.insert(x);
        if model.is_none() || dist > 0.0 || hull.vertices().len() != before {
            model = Some(target_model(hull.vertices(), instance, resolution)?);
        }
        cumulative += dist;
        vector::axpy(&mut sum, 1.0, &u);
        vector::axpy(&mut sum_hat, 1.0, &u_hat);
        let mut rec = RoundRecord::new(t, p, ell, u);
        rec.proj_dist = Some(dist);
        transcript.rounds.push(rec);
    }
    let model = model.ok_or(Error::EmptyHull)?;
    let n = horizon.max(1) as f64;
    let u_bar = vector::scale(&sum, 1.0 / n);
    let u_hat_bar = vector::scale(&sum_hat, 1.0 / n);
    Ok(TwoDimReport {
        total_dist: model.distance(&u_bar)?,
        projection_error: vector::dist(&u_bar, &u_hat_bar),
        approach_error: model.distance(&u_hat_bar)?,
        cumulative_hull_distance: cumulative,
        transcript,
        model,
        hull,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{AdversarySpec, Mixing, Polytope};
    use crate::instances;

    fn triangle() -> Polytope {
        Polytope { vertices: vec![vec![0.5, 0.1], vec![-0.2, 0.6], vec![-0.4, -0.5]], mixing: Mixing::Dirichlet }
    }

    #[test]
    fn inside_model_plays_centroid_response() {
        let g = instances::polygon_16();
        let verts = vec![vec![0.2, 0.0], vec![0.0, 0.2], vec![-0.4, 0.1]];
        let p = base_approachability_step(&[0.0], &verts, &g).unwrap();
        assert_eq!(p, g.response(&vector::mean(&verts).unwrap()).unwrap());
        assert!(matches!(base_approachability_step(&[1.0], &[], &g), Err(Error::EmptyHull)));
    }

    #[test]
    fn singleton_minimizes() {
        let g = instances::bilinear_2d();
        let l0 = vec![0.3, -0.6];
        let lam = vec![0.6, -0.8];
        let p = base_approachability_step(&lam, std::slice::from_ref(&l0), &g).unwrap();
        let (c, b) = g.payoff.directional_in_p(&lam, &l0);
        let v = c + vector::dot(&b, &p);
        assert!((v - (c + g.player_set.min_linear(&b))).abs() < 1e-6);
    }

    #[test]
    fn constant_adversary_has_no_projection_error() {
        let g = instances::polygon_16();
        let spec = AdversarySpec::StrictPolytope {
            polytope: Polytope { vertices: vec![vec![0.2, -0.3]], mixing: Mixing::Dirichlet },
            seed: 0,
        };
        let adv = spec.instantiate(256, 0, &g.adversary_set).unwrap();
        let r = run_two_dim(&g, &adv).unwrap();
        assert_eq!(r.hull.vertices().len(), 1);
        assert!(r.transcript.rounds.iter().all(|x| x.proj_dist == Some(0.0)));
        assert_eq!(r.projection_error, 0.0);
    }

    #[test]
    fn triangle_decomposition() {
        let g = instances::polygon_16();
        let spec = AdversarySpec::StrictPolytope { polytope: triangle(), seed: 3 };
        let adv = spec.instantiate(2048, 1, &g.adversary_set).unwrap();
        let r = run_two_dim(&g, &adv).unwrap();
        assert!(r.total_dist <= r.projection_error + r.approach_error + 1e-9);
        assert!(r.cumulative_hull_distance <= 20.0 * 2048f64.sqrt());
        let recorded: f64 = r.transcript.rounds.iter().map(|x| x.proj_dist.unwrap()).sum();
        assert!((recorded - r.cumulative_hull_distance).abs() <= 1e-9);
        assert!(r.total_dist < 0.2, "{}", r.total_dist);
    }

    #[test]
    fn needs_planar_losses() {
        let g = instances::fast_1d();
        let adv = AdversarySpec::Threshold1D.instantiate(2, 0, &g.adversary_set).unwrap();
        assert!(matches!(run_two_dim(&g, &adv), Err(Error::DimensionMismatch { .. })));
    }
}
