//! Independent numerical oracles: finite differences, the constant-curvature
//! laws of cosines and a dense Euclidean consensus iteration. These validate
//! the geometry and the analytic Hessian bounds without going through the
//! code paths they check.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::kappa::{c_kappa, s_kappa};
use crate::geometry::{Point, Tangent};
use crate::network::Graph;

/// Default step for first-derivative central differences.
pub const H_FIRST: f64 = 1e-5;
/// Default step for second-derivative central differences.
pub const H_SECOND: f64 = 1e-4;

/// Central-difference directional derivative of `f` at the base of `v`,
/// in direction `v`: `(f(exp(h v)) - f(exp(-h v))) / 2h`.
pub fn finite_diff_gradient<F>(f: F, v: &Tangent, h: f64) -> f64
where
    F: Fn(&Point) -> f64,
{
    let m = v.base.manifold;
    let plus = m.exp(&v.scale(h));
    let minus = m.exp(&v.scale(-h));
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// Central second difference of `t -> 1/2 d^2(exp_{x1}(t v1), exp_{x2}(t v2))`
/// at t = 0, where `x1`, `x2` are the anchor points of the two tangents (the
/// endpoints of a geodesic hinge).
pub fn hinge_second_difference(v1: &Tangent, v2: &Tangent, h: f64) -> Result<f64> {
    let m = v1.base.manifold;
    if v2.base.manifold.kind != m.kind {
        return Err(Error::Contract("hinge sides on different manifolds".into()));
    }
    let phi_sq_half = |t: f64| -> f64 {
        let a = m.exp(&v1.scale(t));
        let b = m.exp(&v2.scale(t));
        0.5 * m.dist(&a, &b).powi(2)
    };
    Ok((phi_sq_half(h) - 2.0 * phi_sq_half(0.0) + phi_sq_half(-h)) / (h * h))
}

/// Third side of a geodesic hinge with sides `l1`, `l2` and angle `beta` in
/// a space of constant curvature `kappa`, from the law of cosines:
///
/// ```text
/// kappa = 0:   l^2 = l1^2 + l2^2 - 2 l1 l2 cos(beta)
/// kappa != 0:  C_k(l) = C_k(l1) C_k(l2) + kappa S_k(l1) S_k(l2) cos(beta)
/// ```
///
/// The single curved branch covers both signs once written with the
/// generalized sine and cosine of [`crate::geometry::kappa`].
pub fn cosine_law_third_side(kappa: f64, l1: f64, l2: f64, beta: f64) -> Result<f64> {
    if l1 < 0.0 || l2 < 0.0 {
        return Err(Error::Domain("hinge sides must be non-negative".into()));
    }
    if kappa == 0.0 {
        let sq = l1 * l1 + l2 * l2 - 2.0 * l1 * l2 * beta.cos();
        return Ok(sq.max(0.0).sqrt());
    }
    if kappa > 0.0 {
        let limit = std::f64::consts::PI / kappa.sqrt();
        if l1 >= limit || l2 >= limit {
            return Err(Error::Domain(format!(
                "hinge sides must be below pi/sqrt(kappa) = {limit}"
            )));
        }
    }
    let c = c_kappa(kappa, l1) * c_kappa(kappa, l2)
        + kappa * s_kappa(kappa, l1) * s_kappa(kappa, l2) * beta.cos();
    let l = if kappa > 0.0 {
        c.clamp(-1.0, 1.0).acos() / kappa.sqrt()
    } else {
        c.max(1.0).acosh() / (-kappa).sqrt()
    };
    Ok(l)
}

/// Dense Euclidean consensus iteration `x <- x - eps * x * L` on a matrix of
/// column-per-node coordinates (d rows, N columns). The oracle for the
/// protocol's exact Euclidean behavior.
pub fn laplacian_consensus_oracle(
    g: &Graph,
    x0: &DMatrix<f64>,
    eps: f64,
    iters: usize,
) -> DMatrix<f64> {
    let n = g.n_vertices();
    assert_eq!(x0.ncols(), n, "one column per node");
    let mut lap = DMatrix::zeros(n, n);
    for i in 0..n {
        lap[(i, i)] = g.degree(i) as f64;
    }
    for &(i, j) in g.edges() {
        lap[(i, j)] = -1.0;
        lap[(j, i)] = -1.0;
    }
    let mut x = x0.clone();
    for _ in 0..iters {
        x = &x - (&x * &lap) * eps;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldHandle;
    use crate::network::{make_topology, TopologySpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn finite_diff_of_constant_is_zero() {
        let m = ManifoldHandle::sphere(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = m.base_point();
        let v = m.random_tangent(&x, 1.0, &mut rng);
        assert_eq!(finite_diff_gradient(|_| 3.5, &v, H_FIRST), 0.0);
    }

    #[test]
    fn finite_diff_matches_log_gradient_identity() {
        // grad of x -> 1/2 d^2(x, y) is -log_x(y)
        for m in [
            ManifoldHandle::euclidean(3),
            ManifoldHandle::sphere(3),
            ManifoldHandle::special_orthogonal(4),
            ManifoldHandle::grassmann(5, 2),
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let base = m.base_point();
            for _ in 0..20 {
                let x = m.exp(&m.random_tangent(&base, 0.2, &mut rng));
                let y = m.exp(&m.random_tangent(&base, 0.2, &mut rng));
                let mut v = m.random_tangent(&x, 1.0, &mut rng);
                let n = v.norm();
                v.value /= n;
                let fd = finite_diff_gradient(|p| 0.5 * m.dist(p, &y).powi(2), &v, H_FIRST);
                let neg_log = m.log(&x, &y).unwrap().scale(-1.0);
                let analytic = m.inner(&neg_log, &v).unwrap();
                let scale = analytic.abs().max(1e-3);
                assert!(
                    (fd - analytic).abs() / scale < 1e-5,
                    "{:?}: fd {fd} vs analytic {analytic}",
                    m.kind
                );
            }
        }
    }

    #[test]
    fn hinge_zero_velocities() {
        let m = ManifoldHandle::sphere(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = m.base_point();
        let x1 = m.exp(&m.random_tangent(&y, 0.3, &mut rng));
        let x2 = m.exp(&m.random_tangent(&y, 0.3, &mut rng));
        let v1 = m.zero_tangent(&x1);
        let v2 = m.zero_tangent(&x2);
        let d2 = hinge_second_difference(&v1, &v2, H_SECOND).unwrap();
        assert!(d2.abs() < 1e-8, "{d2}");
    }

    #[test]
    fn hinge_matches_euclidean_closed_form() {
        let m = ManifoldHandle::euclidean(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let o = m.base_point();
        for _ in 0..10 {
            let x1 = m.exp(&m.random_tangent(&o, 1.0, &mut rng));
            let x2 = m.exp(&m.random_tangent(&o, 1.0, &mut rng));
            let v1 = m.random_tangent(&x1, 1.0, &mut rng);
            let v2 = m.random_tangent(&x2, 1.0, &mut rng);
            let d2 = hinge_second_difference(&v1, &v2, H_SECOND).unwrap();
            // analytic: d^2/dt^2 of 1/2 |(x1 + t v1) - (x2 + t v2)|^2 = |v1 - v2|^2
            let analytic = (&v1.value - &v2.value).norm_squared();
            assert!((d2 - analytic).abs() < 1e-6, "{d2} vs {analytic}");
        }
    }

    #[test]
    fn cosine_law_flat_is_pythagoras() {
        let l = cosine_law_third_side(0.0, 3.0, 4.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((l - 5.0).abs() < 1e-12);
        let degenerate = cosine_law_third_side(0.0, 3.0, 4.0, 0.0).unwrap();
        assert!((degenerate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_law_spherical_right_triangle() {
        use std::f64::consts::FRAC_PI_2;
        let l = cosine_law_third_side(1.0, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((l - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn cosine_law_rejects_long_sides_on_positive_curvature() {
        assert!(cosine_law_third_side(1.0, 3.5, 1.0, 0.3).is_err());
    }

    #[test]
    fn laplacian_oracle_hand_iteration() {
        let g = make_topology(&TopologySpec::Line(3)).unwrap();
        let x0 = DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 3.0]);
        let x1 = laplacian_consensus_oracle(&g, &x0, 0.25, 1);
        assert!((x1[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((x1[(0, 1)] - 1.25).abs() < 1e-15);
        assert!((x1[(0, 2)] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn laplacian_oracle_preserves_mean_and_fixed_points() {
        let g = make_topology(&TopologySpec::Ring(5)).unwrap();
        let constant = DMatrix::from_element(2, 5, 1.3);
        let out = laplacian_consensus_oracle(&g, &constant, 0.4, 10);
        assert!((out - &constant).norm() < 1e-14);

        let x0 = DMatrix::from_row_slice(1, 5, &[0.0, 1.0, -2.0, 4.0, 0.5]);
        let mean0 = x0.sum() / 5.0;
        let out = laplacian_consensus_oracle(&g, &x0, 0.3, 7);
        assert!((out.sum() / 5.0 - mean0).abs() < 1e-13);
    }
}
