//! Fréchet (Karcher) mean: the minimizer of the sum of squared geodesic
//! distances to a point set, computed by intrinsic gradient descent with unit
//! step on the averaged log field,
//!
//! ```text
//! x <- exp_x( (1/N) * sum_i log_x(u_i) )
//! ```
//!
//! The result is certified only when the points sit inside a common ball of
//! radius r* around the initialization, the regime where the minimizer is
//! known to be unique.

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone)]
pub struct FrechetConfig {
    pub max_iter: usize,
    /// Gradient-norm threshold for the averaged log field.
    pub tol: f64,
    pub init: FrechetInit,
}

#[derive(Debug, Clone)]
pub enum FrechetInit {
    FirstPoint,
    GivenPoint(Point),
}

impl Default for FrechetConfig {
    fn default() -> Self {
        FrechetConfig {
            max_iter: 1000,
            tol: 1e-12,
            init: FrechetInit::FirstPoint,
        }
    }
}

/// Outcome of a mean computation. `converged` reports whether the gradient
/// threshold was met; `certified` whether the inputs stayed inside the
/// uniqueness ball of radius r* around the returned mean.
#[derive(Debug, Clone)]
pub struct FrechetOutcome {
    pub mean: Point,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub certified: bool,
}

/// Iterates the Karcher fixed-point map until the averaged log field is
/// below `cfg.tol`. When the iteration budget runs out the last iterate is
/// still returned, flagged `converged = false`.
///
/// ```
/// use manifold_consensus::frechet::{frechet_mean, FrechetConfig};
/// use manifold_consensus::geometry::ManifoldHandle;
///
/// let m = ManifoldHandle::sphere(2);
/// let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
/// let x = m.base_point();
/// let a = m.exp(&m.random_tangent(&x, 0.3, &mut rng));
/// let b = m.exp(&m.random_tangent(&x, 0.3, &mut rng));
///
/// let out = frechet_mean(&[a.clone(), b.clone()], &FrechetConfig::default()).unwrap();
/// // the mean of two points is the geodesic midpoint
/// assert!((m.dist(&out.mean, &a) - 0.5 * m.dist(&a, &b)).abs() < 1e-9);
/// assert!(out.certified);
/// ```
pub fn frechet_mean(points: &[Point], cfg: &FrechetConfig) -> Result<FrechetOutcome> {
    if points.is_empty() {
        return Err(Error::Contract("frechet_mean of an empty set".into()));
    }
    let manifold = points[0].manifold;
    for p in points {
        if p.manifold.kind != manifold.kind {
            return Err(Error::Contract("points on different manifolds".into()));
        }
    }
    let mut x = match &cfg.init {
        FrechetInit::FirstPoint => points[0].clone(),
        FrechetInit::GivenPoint(p) => p.clone(),
    };
    let inv_n = 1.0 / points.len() as f64;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    for iter in 0..cfg.max_iter {
        let mut w = manifold.zero_tangent(&x);
        for p in points {
            let l = manifold.log(&x, p)?;
            w.value += &l.value;
        }
        w.value *= inv_n;
        grad_norm = manifold.norm(&w);
        iterations = iter;
        if grad_norm < cfg.tol {
            break;
        }
        x = manifold.exp(&w);
    }
    let certified =
        points.iter().all(|p| manifold.dist(&x, p) < manifold.r_star);
    Ok(FrechetOutcome {
        converged: grad_norm < cfg.tol,
        certified,
        grad_norm,
        iterations,
        mean: x,
    })
}

/// Sum of squared geodesic distances from `center` to the points.
pub fn frechet_variance(points: &[Point], center: &Point) -> f64 {
    let m = center.manifold;
    points.iter().map(|p| m.dist(center, p).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldHandle;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn euclid_point(coords: &[f64]) -> Point {
        let m = ManifoldHandle::euclidean(coords.len());
        Point::new(m, DMatrix::from_column_slice(coords.len(), 1, coords)).unwrap()
    }

    #[test]
    fn identical_points_return_immediately() {
        let m = ManifoldHandle::sphere(2);
        let p = m.base_point();
        let out = frechet_mean(&[p.clone(), p.clone(), p.clone()], &FrechetConfig::default())
            .unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.converged && out.certified);
        assert_eq!(out.mean.value, p.value);
        assert_eq!(frechet_variance(&[p.clone()], &p), 0.0);
    }

    #[test]
    fn euclidean_mean_is_arithmetic() {
        let pts = [
            euclid_point(&[0.0, 0.0]),
            euclid_point(&[2.0, 4.0]),
            euclid_point(&[4.0, 2.0]),
        ];
        let out = frechet_mean(&pts, &FrechetConfig::default()).unwrap();
        assert!((out.mean.value[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((out.mean.value[(1, 0)] - 2.0).abs() < 1e-12);
        // hand evaluation of the variance for a pair
        let pair = [euclid_point(&[0.0]), euclid_point(&[2.0])];
        assert!((frechet_variance(&pair, &euclid_point(&[1.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_mean_is_geodesic_midpoint() {
        for m in [
            ManifoldHandle::sphere(3),
            ManifoldHandle::special_orthogonal(3),
            ManifoldHandle::grassmann(4, 2),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let x = m.base_point();
            let a = m.exp(&m.random_tangent(&x, 0.2, &mut rng));
            let b = m.exp(&m.random_tangent(&x, 0.2, &mut rng));
            let out = frechet_mean(&[a.clone(), b.clone()], &FrechetConfig::default()).unwrap();
            let da = m.dist(&out.mean, &a);
            let db = m.dist(&out.mean, &b);
            let d = m.dist(&a, &b);
            assert!((da - db).abs() < 1e-9, "midpoint asymmetry {da} vs {db}");
            assert!((da - 0.5 * d).abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_pair_variance_at_midpoint() {
        let m = ManifoldHandle::sphere(2);
        let e1 = Point::new(m, DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap();
        let e2 = Point::new(m, DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0])).unwrap();
        let out = frechet_mean(&[e1.clone(), e2.clone()], &FrechetConfig::default()).unwrap();
        let v = frechet_variance(&[e1, e2], &out.mean);
        let expected = 2.0 * (std::f64::consts::FRAC_PI_4).powi(2);
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
    }

    #[test]
    fn stationarity_and_local_optimality() {
        let m = ManifoldHandle::special_orthogonal(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x0 = m.base_point();
        let pts: Vec<Point> = (0..6)
            .map(|_| m.exp(&m.random_tangent(&x0, 0.25, &mut rng)))
            .collect();
        let out = frechet_mean(&pts, &FrechetConfig::default()).unwrap();
        assert!(out.converged);
        assert!(out.grad_norm < pts.len() as f64 * 1e-12);
        let base = frechet_variance(&pts, &out.mean);
        for p in &pts {
            assert!(base <= frechet_variance(&pts, p) + 1e-12);
        }
        // perturbations do not improve the variance
        let h = 1e-3;
        for _ in 0..50 {
            let mut dir = m.random_tangent(&out.mean, 1.0, &mut rng);
            let n = dir.norm();
            dir.value /= n;
            let nearby = m.exp(&dir.scale(h));
            assert!(base <= frechet_variance(&pts, &nearby) + 1e-8);
        }
    }

    #[test]
    fn equivariance_under_rotation() {
        let m = ManifoldHandle::special_orthogonal(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x0 = m.base_point();
        let pts: Vec<Point> = (0..5)
            .map(|_| m.exp(&m.random_tangent(&x0, 0.3, &mut rng)))
            .collect();
        let g = m.exp(&m.random_tangent(&x0, 0.8, &mut rng));
        let rotated: Vec<Point> = pts
            .iter()
            .map(|p| Point::new(m, &g.value * &p.value).unwrap())
            .collect();
        let mean = frechet_mean(&pts, &FrechetConfig::default()).unwrap().mean;
        let mean_rot = frechet_mean(&rotated, &FrechetConfig::default()).unwrap().mean;
        let pushed = Point::new(m, &g.value * &mean.value).unwrap();
        assert!(m.dist(&pushed, &mean_rot) < 1e-8);
    }

    #[test]
    fn max_iter_returns_flagged_iterate() {
        let m = ManifoldHandle::sphere(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x0 = m.base_point();
        let pts: Vec<Point> = (0..4)
            .map(|_| m.exp(&m.random_tangent(&x0, 0.3, &mut rng)))
            .collect();
        let cfg = FrechetConfig {
            max_iter: 1,
            ..FrechetConfig::default()
        };
        let out = frechet_mean(&pts, &cfg).unwrap();
        assert!(!out.converged);
    }
}
