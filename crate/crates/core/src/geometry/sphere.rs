//! Sⁿ ⊂ ℝⁿ⁺¹: great-circle geometry in closed form.
//!
//! A point is a unit column vector, a tangent is an ambient vector orthogonal
//! to it. `exp` follows a great circle, `log` inverts it; the angle is
//! computed with `atan2` so small and near-antipodal separations are both
//! handled at full precision.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::CUT_LOCUS_MARGIN;
use crate::error::{Error, Result};

pub fn exp(x: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let theta = v.norm();
    if theta < 1e-300 {
        return x.clone();
    }
    x * theta.cos() + v * (theta.sin() / theta)
}

pub fn log(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let c = x.dot(y);
    let perp = y - x * c;
    let s = perp.norm();
    let theta = s.atan2(c);
    if theta >= std::f64::consts::PI - CUT_LOCUS_MARGIN {
        return Err(Error::CutLocus {
            context: "sphere points are (nearly) antipodal",
            dist: theta,
        });
    }
    if s < 1e-300 {
        return Ok(DMatrix::zeros(x.nrows(), 1));
    }
    // theta/s = theta/sin(theta): both factors vanish together, the ratio
    // stays well conditioned down to theta = 0.
    Ok(perp * (theta / s))
}

pub fn dist(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let c = x.dot(y);
    let s = (y - x * c).norm();
    s.atan2(c)
}

pub fn random_tangent<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    sigma: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    if sigma == 0.0 {
        return DMatrix::zeros(x.nrows(), 1);
    }
    let normal = Normal::new(0.0, sigma).expect("sigma > 0");
    let g = DMatrix::from_fn(x.nrows(), 1, |_, _| normal.sample(rng));
    // Projecting an isotropic ambient Gaussian yields i.i.d. N(0, sigma^2)
    // coefficients in any orthonormal tangent basis.
    let c = x.dot(&g);
    g - x * c
}
