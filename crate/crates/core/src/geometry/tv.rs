use super::{q_int_membership, trimmed_region, PointCloud, WeightVector};
use crate::lp::{Cmp, LinearProgram};
use crate::vector::dot;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TvSolution {
    pub weights: WeightVector<f64>,
    pub mean: Vec<f64>,
    /// `sum_i |alpha_i - 1/n|`.
    pub tv: f64,
}

/// Reweights the cloud as little as possible (in L1 distance to uniform) so that the
/// weighted mean lands in the trimmed region for `removals` removals.
///
/// Solved as a linear program in `alpha = 1/n + a - r` with region facets added by
/// constraint generation.
pub fn tv_closest_mean(cloud: &PointCloud<f64>, removals: usize) -> Result<TvSolution> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let n = cloud.len();
    if removals >= n {
        return Err(Error::Infeasible(format!("{removals} removals from {n} points")));
    }
    let mean = cloud.mean()?;
    let uniform = || TvSolution {
        weights: WeightVector::uniform(n),
        mean: mean.clone(),
        tv: 0.0,
    };
    if removals == 0 {
        return Ok(uniform());
    }
    let exact = cloud.dim() <= 2;
    if exact && q_int_membership(&mean, cloud, removals)? {
        return Ok(uniform());
    }
    let region = trimmed_region(cloud, removals)?;
    if region.is_empty() {
        return Err(Error::Infeasible("trimmed region is empty".into()));
    }
    let facets = region.constraints();
    if !exact && region.contains(&mean, 0.0) {
        return Ok(uniform());
    }
    // shrink facets slightly so the result has positive depth, unless that empties the region
    for margin in [1e-9, 0.0] {
        if let Some(sol) = solve(cloud, &facets, margin)? {
            if !exact || margin == 0.0 || q_int_membership(&sol.mean, cloud, removals)? {
                return Ok(sol);
            }
        }
    }
    Err(Error::Infeasible("no reweighting reaches the trimmed region".into()))
}

fn solve(cloud: &PointCloud<f64>, facets: &[(Vec<f64>, f64)], margin: f64) -> Result<Option<TvSolution>> {
    let n = cloud.len();
    let u = 1.0 / n as f64;
    let coeffs: Vec<Vec<f64>> = facets
        .iter()
        .map(|(nrm, _)| cloud.points().iter().map(|p| dot(nrm, p)).collect())
        .collect();
    let violation = |k: usize, alpha: &[f64]| dot(&coeffs[k], alpha) - (facets[k].1 - margin);

    let mut alpha = vec![u; n];
    let mut active: Vec<usize> = Vec::new();
    for _ in 0..500 {
        let worst = (0..facets.len())
            .filter(|k| !active.contains(k))
            .map(|k| (k, violation(k, &alpha)))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((k, v)) if v > 1e-12 => active.push(k),
            _ => {
                // prefer plain renormalization of the kept mass when it is also feasible
                let removed: Vec<f64> = alpha.iter().map(|a| (u - a).max(0.0)).collect();
                let total: f64 = removed.iter().sum();
                if total > 0.0 && total < 1.0 {
                    let renorm: Vec<f64> = removed.iter().map(|r| (u - r) / (1.0 - total)).collect();
                    if (0..facets.len()).all(|k| violation(k, &renorm) <= 1e-12) {
                        alpha = renorm;
                    }
                }
                let w: Vec<f64> = alpha.iter().map(|a| a.max(0.0)).collect();
                let s: f64 = w.iter().sum();
                let w: Vec<f64> = w.into_iter().map(|x| x / s).collect();
                let tv = w.iter().map(|x| (x - u).abs()).sum();
                let weights = WeightVector::new(w)?;
                let mean = weights.apply(cloud);
                return Ok(Some(TvSolution { weights, mean, tv }));
            }
        }
        // variables: a_0..a_{n-1}, r_0..r_{n-1}
        let mut lp = LinearProgram::new(2 * n);
        lp.minimize(vec![1.0; 2 * n]);
        for i in 0..n {
            lp.bounds(n + i, 0.0, u);
        }
        let mut bal = vec![1.0; n];
        bal.extend(std::iter::repeat_n(-1.0, n));
        lp.row(bal, Cmp::Eq, 0.0);
        for &k in &active {
            let mut row = coeffs[k].clone();
            row.extend(coeffs[k].iter().map(|c| -c));
            let base: f64 = coeffs[k].iter().sum::<f64>() * u;
            lp.row(row, Cmp::Le, facets[k].1 - margin - base);
        }
        match lp.solve() {
            Ok(sol) => {
                for i in 0..n {
                    alpha[i] = u + sol.x[i] - sol.x[n + i];
                }
            }
            Err(Error::Infeasible(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Lp("constraint generation did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn no_removals_is_uniform() {
        let c = PointCloud::new(vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![5.0, -1.0]]).unwrap();
        let s = tv_closest_mean(&c, 0).unwrap();
        assert_eq!(s.tv, 0.0);
        assert_eq!(s.weights, WeightVector::uniform(3));
        assert_eq!(s.mean, c.mean().unwrap());
    }

    #[test]
    fn drops_collinear_outlier() {
        let c = PointCloud::from_scalars(&[0.0, 0.0, 0.0, 0.0, 0.0, 10.0]);
        let s = tv_closest_mean(&c, 1).unwrap();
        assert!(s.mean[0].abs() < 1e-12);
        let w = s.weights.as_slice();
        assert!(w[5].abs() < 1e-12);
        for x in &w[..5] {
            assert!((x - 0.2).abs() < 1e-12);
        }
        // 5 * (1/5 - 1/6) + 1/6
        assert!((s.tv - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_outlier_in_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut pts: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.gen_range(0.0..0.3), rng.gen_range(0.0..0.3)]).collect();
        pts.push(vec![5.0, 5.0]);
        let c = PointCloud::new(pts).unwrap();
        let s = tv_closest_mean(&c, 1).unwrap();
        assert!(s.tv <= 2.0 / 21.0 * (1.0 + 1e-6));
        assert!(q_int_membership(&s.mean, &c, 1).unwrap());
    }

    #[test]
    fn too_many_removals() {
        let c = PointCloud::from_scalars(&[0.0, 1.0]);
        assert!(matches!(tv_closest_mean(&c, 2), Err(Error::Infeasible(_))));
        assert!(matches!(tv_closest_mean(&c, 1), Err(Error::Infeasible(_))));
    }
}
