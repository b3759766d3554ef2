//! SO(n): rotation matrices with the bi-invariant ½·trace metric.
//!
//! With this normalization the skew basis matrices `E_ij = e_i e_jᵀ − e_j e_iᵀ`
//! (i < j) are orthonormal, and a rotation by angle θ in a single plane is at
//! distance θ from the identity.
//!
//! `exp` reduces to the matrix exponential of the body-frame velocity;
//! `log` and `dist` go through the real Schur form of the relative rotation,
//! which groups conjugate eigenvalue pairs into 2×2 planar blocks with
//! rotation angles in (−π, π]. An angle of exactly π (a −1 eigenvalue pair)
//! is the cut locus and makes `log` fail.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::CUT_LOCUS_MARGIN;
use crate::error::{Error, Result};

pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    (m.transpose() * m - DMatrix::identity(n, n)).norm()
}

/// Nearest orthogonal matrix in Frobenius norm (polar factor via SVD).
pub fn polar_orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    u * v_t
}

pub fn exp(x: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let a = x.transpose() * v;
    let skew = (&a - a.transpose()) * 0.5;
    x * skew.exp()
}

/// Below this Frobenius distance from the identity the log is computed by
/// the Mercator series instead of the Schur form: the QR iteration can stall
/// indefinitely when all eigenvalues cluster at 1.
const SERIES_THRESHOLD: f64 = 0.1;

/// `log(I + E)` by the alternating power series, valid for small `E` and
/// fully converged at these sizes within ~25 terms.
fn log_series(r: &DMatrix<f64>) -> DMatrix<f64> {
    let n = r.nrows();
    let e = r - DMatrix::identity(n, n);
    let mut term = e.clone();
    let mut sum = e.clone();
    for k in 2..=30 {
        term *= &e;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        sum += &term * (sign / k as f64);
        if term.norm() < 1e-18 {
            break;
        }
    }
    (&sum - sum.transpose()) * 0.5
}

/// Real Schur form with bounded iteration counts and an escalating deflation
/// tolerance; the unbounded default can loop forever on clustered spectra.
fn schur_unpack(r: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    for eps in [1e-14, 1e-12, 1e-9, 1e-6] {
        if let Some(s) = r.clone().try_schur(eps, 2000) {
            return s.unpack();
        }
    }
    r.clone()
        .try_schur(1e-4, 10_000)
        .expect("Schur iteration failed to converge for a rotation matrix")
        .unpack()
}

/// Planar rotation angles of a rotation matrix, one per 2×2 Schur block,
/// plus π for every pair of −1 eigenvalues.
fn plane_angles(r: &DMatrix<f64>) -> Vec<f64> {
    let n = r.nrows();
    let (_, t) = schur_unpack(r);
    let mut angles = Vec::new();
    let mut negatives = 0usize;
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-12 {
            let s = 0.5 * (t[(i + 1, i)] - t[(i, i + 1)]);
            let c = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            angles.push(s.atan2(c).abs());
            i += 2;
        } else {
            if t[(i, i)] < 0.0 {
                negatives += 1;
            }
            i += 1;
        }
    }
    for _ in 0..negatives / 2 {
        angles.push(std::f64::consts::PI);
    }
    angles
}

/// Principal matrix logarithm of a rotation, as a skew-symmetric matrix.
fn log_rotation(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = r.nrows();
    if (r - DMatrix::identity(n, n)).norm() < SERIES_THRESHOLD {
        return Ok(log_series(r));
    }
    let (q, t) = schur_unpack(r);
    let mut s_mat = DMatrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-12 {
            let s = 0.5 * (t[(i + 1, i)] - t[(i, i + 1)]);
            let c = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let theta = s.atan2(c);
            if theta.abs() >= std::f64::consts::PI - CUT_LOCUS_MARGIN {
                return Err(Error::CutLocus {
                    context: "rotation by (nearly) pi in some plane",
                    dist: theta.abs(),
                });
            }
            s_mat[(i, i + 1)] = -theta;
            s_mat[(i + 1, i)] = theta;
            i += 2;
        } else {
            if t[(i, i)] < 0.0 {
                return Err(Error::CutLocus {
                    context: "rotation by exactly pi in some plane",
                    dist: std::f64::consts::PI,
                });
            }
            i += 1;
        }
    }
    let l = &q * s_mat * q.transpose();
    // kill symmetric round-off
    Ok((&l - l.transpose()) * 0.5)
}

pub fn log(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let rel = x.transpose() * y;
    Ok(x * log_rotation(&rel)?)
}

pub fn dist(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let rel = x.transpose() * y;
    let n = rel.nrows();
    if (&rel - DMatrix::identity(n, n)).norm() < SERIES_THRESHOLD {
        // |log|_F / sqrt(2) equals the root-sum-square of the plane angles
        return log_series(&rel).norm() / std::f64::consts::SQRT_2;
    }
    plane_angles(&rel)
        .iter()
        .map(|a| a * a)
        .sum::<f64>()
        .sqrt()
}

pub fn random_tangent<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    sigma: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    let n = x.nrows();
    if sigma == 0.0 {
        return DMatrix::zeros(n, n);
    }
    let normal = Normal::new(0.0, sigma).expect("sigma > 0");
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = normal.sample(rng);
            a[(i, j)] = c;
            a[(j, i)] = -c;
        }
    }
    x * a
}
