//! The generalized sine and cosine `S_κ`, `C_κ`.
//!
//! These interpolate between trigonometric (κ > 0), affine (κ = 0) and
//! hyperbolic (κ < 0) behavior and appear in every curvature-dependent
//! bound in this crate:
//!
//! ```text
//! S_κ(t) = sin(√κ t)/√κ        C_κ(t) = cos(√κ t)         κ > 0
//! S_κ(t) = t                   C_κ(t) = 1                 κ = 0
//! S_κ(t) = sinh(√|κ| t)/√|κ|   C_κ(t) = cosh(√|κ| t)      κ < 0
//! ```
//!
//! Both are continuous in κ at κ = 0.

/// Generalized sine.
///
/// ```
/// use manifold_consensus::geometry::kappa::s_kappa;
/// assert_eq!(s_kappa(0.0, 2.5), 2.5);
/// assert!((s_kappa(1.0, std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-15);
/// ```
pub fn s_kappa(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let s = kappa.sqrt();
        (s * t).sin() / s
    } else if kappa < 0.0 {
        let s = (-kappa).sqrt();
        (s * t).sinh() / s
    } else {
        t
    }
}

/// Generalized cosine.
pub fn c_kappa(kappa: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        (kappa.sqrt() * t).cos()
    } else if kappa < 0.0 {
        ((-kappa).sqrt() * t).cosh()
    } else {
        1.0
    }
}
