//! ℝⁿ: the trivial geometry. Geodesics are straight lines, exp/log are
//! addition and subtraction.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub fn exp(x: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    x + v
}

pub fn log(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    y - x
}

pub fn dist(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (y - x).norm()
}

pub fn random_tangent<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    sigma: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("sigma >= 0");
    DMatrix::from_fn(x.nrows(), x.ncols(), |_, _| {
        if sigma > 0.0 {
            normal.sample(rng)
        } else {
            0.0
        }
    })
}
