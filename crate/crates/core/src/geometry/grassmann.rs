//! Grass(n, p): p-dimensional subspaces of ℝⁿ.
//!
//! A subspace is stored as one orthonormal n×p representative; all operations
//! depend only on its column span. Tangents are horizontal representatives
//! (XᵀH = 0) under the trace metric, in which the geodesic distance is the
//! root-sum-square of the principal angles between the two subspaces.
//!
//! exp/log use the standard SVD closed forms: with M = X₁ᵀX₂,
//! `log = U·atan(Σ)·Vᵀ` where `UΣVᵀ` is the thin SVD of `(X₂ − X₁M)M⁻¹`, and
//! `exp_X(UΣVᵀ) = XV·cos(Σ)·Vᵀ + U·sin(Σ)·Vᵀ`. A singular M means a principal
//! angle of π/2, the injectivity boundary, and `log` fails there.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let p = m.ncols();
    (m.transpose() * m - DMatrix::identity(p, p)).norm()
}

pub fn qr_orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().qr().q()
}

pub fn exp(x: &DMatrix<f64>, h: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = h.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let p = x.ncols();
    let mut cos_s = DMatrix::zeros(p, p);
    let mut sin_s = DMatrix::zeros(p, p);
    for i in 0..svd.singular_values.len() {
        cos_s[(i, i)] = svd.singular_values[i].cos();
        sin_s[(i, i)] = svd.singular_values[i].sin();
    }
    let v = v_t.transpose();
    x * &v * cos_s * &v_t + u * sin_s * &v_t
}

/// Principal angles between the spans of two orthonormal representatives,
/// in increasing order.
pub fn principal_angles(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Vec<f64> {
    let m = x.transpose() * y;
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv.iter().map(|s| s.clamp(-1.0, 1.0).acos()).collect()
}

/// The tangent direction matrix `(Y − XM)M⁻¹` whose singular values are the
/// tangents of the principal angles.
fn direction(x: &DMatrix<f64>, y: &DMatrix<f64>, m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let rhs = (y - x * m).transpose();
    let sol = m.transpose().lu().solve(&rhs)?;
    Some(sol.transpose())
}

pub fn log(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = x.transpose() * y;
    let sv_min = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    if sv_min < 1e-9 {
        return Err(Error::CutLocus {
            context: "a principal angle reaches pi/2",
            dist: std::f64::consts::FRAC_PI_2,
        });
    }
    let d = direction(x, y, &m).ok_or(Error::CutLocus {
        context: "a principal angle reaches pi/2",
        dist: std::f64::consts::FRAC_PI_2,
    })?;
    let svd = d.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let p = x.ncols();
    let mut atan_s = DMatrix::zeros(p, p);
    for i in 0..svd.singular_values.len() {
        atan_s[(i, i)] = svd.singular_values[i].atan();
    }
    Ok(u * atan_s * v_t)
}

pub fn dist(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let m = x.transpose() * y;
    let sv = m.clone().svd(false, false).singular_values;
    let sv_min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    // near the cut locus fall back to acos of the principal angles
    if sv_min > 1e-6 {
        // atan of the direction matrix's singular values: accurate for small
        // principal angles, where acos(sigma ~ 1) loses half the digits.
        if let Some(d) = direction(x, y, &m) {
            let ds = d.svd(false, false).singular_values;
            return ds.iter().map(|s| s.atan().powi(2)).sum::<f64>().sqrt();
        }
    }
    principal_angles(x, y).iter().map(|t| t * t).sum::<f64>().sqrt()
}

pub fn random_tangent<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    sigma: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    let (n, p) = x.shape();
    if sigma == 0.0 {
        return DMatrix::zeros(n, p);
    }
    let normal = Normal::new(0.0, sigma).expect("sigma > 0");
    let g = DMatrix::from_fn(n, p, |_, _| normal.sample(rng));
    // horizontal projection (I - XX^T)G
    let coeff = x.transpose() * &g;
    g - x * coeff
}
