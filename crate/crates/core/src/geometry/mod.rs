//! Intrinsic Riemannian primitives for the four manifold families used by the
//! consensus protocol: Euclidean space ℝⁿ, the sphere Sⁿ, the rotation group
//! SO(n) and the Grassmann manifold Grass(n, p).
//!
//! Every operation is a pure function of its inputs. Points and tangents are
//! stored as dense real matrices; a [`ManifoldHandle`] carries the dimensions
//! together with curvature metadata (sectional curvature bounds, injectivity
//! radius and the convexity radius `r*`).

pub mod kappa;

mod euclidean;
mod grassmann;
mod rotation;
mod sphere;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};

/// Residual above which a freshly computed point is re-orthonormalized.
const REORTH_TOL: f64 = 1e-12;

/// Margin used when refusing logarithms near the cut locus.
const CUT_LOCUS_MARGIN: f64 = 1e-9;

/// The manifold families supported by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    /// ℝⁿ with the standard inner product.
    Euclidean(usize),
    /// Sⁿ ⊂ ℝⁿ⁺¹, unit vectors with the ambient inner product.
    Sphere(usize),
    /// SO(n), rotation matrices with the ½·trace metric.
    SpecialOrthogonal(usize),
    /// Grass(n, p), p-dimensional subspaces of ℝⁿ, trace metric on
    /// horizontal vectors.
    Grassmann(usize, usize),
}

/// A manifold instance: its kind plus the curvature metadata that the
/// step-size calculus consumes.
///
/// Catalog (with the metric conventions above):
///
/// | manifold       | δ   | Δ   | inj  | r*   |
/// |----------------|-----|-----|------|------|
/// | ℝⁿ             | 0   | 0   | ∞    | ∞    |
/// | Sⁿ             | 1   | 1   | π    | π/2  |
/// | SO(3)          | ¼   | ¼   | π    | π/2  |
/// | SO(n), n ≥ 4   | 0   | ½   | π    | π/2  |
/// | Grass(n, p)    | 0   | 2   | π/2  | π/4  |
///
/// `r* = ½·min{inj, π/√Δ}` with the convention `1/√Δ = +∞` for Δ ≤ 0; balls
/// of radius at most `r*` are geodesically convex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldHandle {
    pub kind: ManifoldKind,
    pub intrinsic_dim: usize,
    /// Lower sectional-curvature bound δ.
    pub curv_lo: f64,
    /// Upper sectional-curvature bound Δ.
    pub curv_hi: f64,
    /// Injectivity radius (`f64::INFINITY` for ℝⁿ).
    pub inj: f64,
    /// Convexity radius r*.
    pub r_star: f64,
}

fn r_star_from(inj: f64, curv_hi: f64) -> f64 {
    let conj = if curv_hi > 0.0 {
        std::f64::consts::PI / curv_hi.sqrt()
    } else {
        f64::INFINITY
    };
    0.5 * inj.min(conj)
}

impl ManifoldHandle {
    pub fn new(kind: ManifoldKind) -> Result<Self> {
        use std::f64::consts::PI;
        let (intrinsic_dim, curv_lo, curv_hi, inj) = match kind {
            ManifoldKind::Euclidean(n) => {
                if n == 0 {
                    return Err(Error::Domain("Euclidean dimension must be >= 1".into()));
                }
                (n, 0.0, 0.0, f64::INFINITY)
            }
            ManifoldKind::Sphere(n) => {
                if n == 0 {
                    return Err(Error::Domain("sphere dimension must be >= 1".into()));
                }
                (n, 1.0, 1.0, PI)
            }
            ManifoldKind::SpecialOrthogonal(n) => match n {
                0 | 1 => {
                    return Err(Error::Domain("SO(n) requires n >= 2".into()));
                }
                2 => (1, 0.0, 0.0, PI),
                3 => (3, 0.25, 0.25, PI),
                _ => (n * (n - 1) / 2, 0.0, 0.5, PI),
            },
            ManifoldKind::Grassmann(n, p) => {
                if p == 0 || p >= n {
                    return Err(Error::Domain(format!(
                        "Grass(n, p) requires 1 <= p <= n-1, got ({n}, {p})"
                    )));
                }
                (p * (n - p), 0.0, 2.0, PI / 2.0)
            }
        };
        Ok(ManifoldHandle {
            kind,
            intrinsic_dim,
            curv_lo,
            curv_hi,
            inj,
            r_star: r_star_from(inj, curv_hi),
        })
    }

    pub fn euclidean(n: usize) -> Self {
        Self::new(ManifoldKind::Euclidean(n)).expect("n >= 1")
    }

    pub fn sphere(n: usize) -> Self {
        Self::new(ManifoldKind::Sphere(n)).expect("n >= 1")
    }

    pub fn special_orthogonal(n: usize) -> Self {
        Self::new(ManifoldKind::SpecialOrthogonal(n)).expect("n >= 2")
    }

    pub fn grassmann(n: usize, p: usize) -> Self {
        Self::new(ManifoldKind::Grassmann(n, p)).expect("1 <= p <= n-1")
    }

    /// Shape of the matrix representing a point.
    pub fn point_shape(&self) -> (usize, usize) {
        match self.kind {
            ManifoldKind::Euclidean(n) => (n, 1),
            ManifoldKind::Sphere(n) => (n + 1, 1),
            ManifoldKind::SpecialOrthogonal(n) => (n, n),
            ManifoldKind::Grassmann(n, p) => (n, p),
        }
    }

    /// A fixed, deterministic base point: the origin for ℝⁿ, e₁ for Sⁿ, the
    /// identity for SO(n) and the first p coordinate axes for Grass(n, p).
    pub fn base_point(&self) -> Point {
        let (rows, cols) = self.point_shape();
        let value = match self.kind {
            ManifoldKind::Euclidean(_) => DMatrix::zeros(rows, cols),
            ManifoldKind::Sphere(_) => {
                let mut v = DMatrix::zeros(rows, 1);
                v[(0, 0)] = 1.0;
                v
            }
            ManifoldKind::SpecialOrthogonal(n) => DMatrix::identity(n, n),
            ManifoldKind::Grassmann(n, p) => {
                let mut v = DMatrix::zeros(n, p);
                for j in 0..p {
                    v[(j, j)] = 1.0;
                }
                v
            }
        };
        Point {
            manifold: *self,
            value,
        }
    }

    /// Riemannian inner product of two tangents anchored at the same point.
    pub fn inner(&self, v: &Tangent, w: &Tangent) -> Result<f64> {
        self.check_same_anchor(v, w)?;
        Ok(self.inner_raw(&v.value, &w.value))
    }

    /// Metric on raw coefficient matrices (no anchor check).
    fn inner_raw(&self, v: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
        let dot = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>();
        match self.kind {
            ManifoldKind::SpecialOrthogonal(_) => 0.5 * dot,
            _ => dot,
        }
    }

    /// Norm induced by [`ManifoldHandle::inner`].
    pub fn norm(&self, v: &Tangent) -> f64 {
        self.inner_raw(&v.value, &v.value).sqrt()
    }

    /// Exponential map: follow the geodesic with initial velocity `v` for
    /// unit time. Globally defined on all four (complete) families.
    pub fn exp(&self, v: &Tangent) -> Point {
        let value = match self.kind {
            ManifoldKind::Euclidean(_) => euclidean::exp(&v.base.value, &v.value),
            ManifoldKind::Sphere(_) => sphere::exp(&v.base.value, &v.value),
            ManifoldKind::SpecialOrthogonal(_) => rotation::exp(&v.base.value, &v.value),
            ManifoldKind::Grassmann(_, _) => grassmann::exp(&v.base.value, &v.value),
        };
        let mut p = Point {
            manifold: *self,
            value,
        };
        self.reorthonormalize(&mut p);
        p
    }

    /// Logarithm map: the tangent at `x` pointing to `y` with norm
    /// `dist(x, y)`. Fails with [`Error::CutLocus`] when `y` is at or beyond
    /// the cut locus of `x`.
    pub fn log(&self, x: &Point, y: &Point) -> Result<Tangent> {
        self.check_same_manifold(&x.manifold)?;
        self.check_same_manifold(&y.manifold)?;
        let value = match self.kind {
            ManifoldKind::Euclidean(_) => euclidean::log(&x.value, &y.value),
            ManifoldKind::Sphere(_) => sphere::log(&x.value, &y.value)?,
            ManifoldKind::SpecialOrthogonal(_) => rotation::log(&x.value, &y.value)?,
            ManifoldKind::Grassmann(_, _) => grassmann::log(&x.value, &y.value)?,
        };
        Ok(Tangent {
            base: x.clone(),
            value,
        })
    }

    /// Geodesic distance. Total (never errors), symmetric, zero iff the two
    /// points coincide (same subspace for Grassmann).
    pub fn dist(&self, x: &Point, y: &Point) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean(_) => euclidean::dist(&x.value, &y.value),
            ManifoldKind::Sphere(_) => sphere::dist(&x.value, &y.value),
            ManifoldKind::SpecialOrthogonal(_) => rotation::dist(&x.value, &y.value),
            ManifoldKind::Grassmann(_, _) => grassmann::dist(&x.value, &y.value),
        }
    }

    /// A random tangent at `x` whose coefficients in an orthonormal basis of
    /// the tangent space are i.i.d. Normal(0, σ²), so the expected squared
    /// norm is `σ²·intrinsic_dim`.
    pub fn random_tangent<R: Rng + ?Sized>(&self, x: &Point, sigma: f64, rng: &mut R) -> Tangent {
        let value = match self.kind {
            ManifoldKind::Euclidean(_) => euclidean::random_tangent(&x.value, sigma, rng),
            ManifoldKind::Sphere(_) => sphere::random_tangent(&x.value, sigma, rng),
            ManifoldKind::SpecialOrthogonal(_) => rotation::random_tangent(&x.value, sigma, rng),
            ManifoldKind::Grassmann(_, _) => grassmann::random_tangent(&x.value, sigma, rng),
        };
        Tangent {
            base: x.clone(),
            value,
        }
    }

    /// The zero tangent at `x`.
    pub fn zero_tangent(&self, x: &Point) -> Tangent {
        let (rows, cols) = self.point_shape();
        Tangent {
            base: x.clone(),
            value: DMatrix::zeros(rows, cols),
        }
    }

    /// Scale a geodesic: the point `exp_x(t · log_x(y))`.
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        let v = self.log(x, y)?;
        Ok(self.exp(&v.scale(t)))
    }

    fn reorthonormalize(&self, p: &mut Point) {
        match self.kind {
            ManifoldKind::Euclidean(_) => {}
            ManifoldKind::Sphere(_) => {
                let n = p.value.norm();
                if (n - 1.0).abs() > REORTH_TOL {
                    p.value /= n;
                }
            }
            ManifoldKind::SpecialOrthogonal(_) => {
                if rotation::orthogonality_residual(&p.value) > REORTH_TOL {
                    p.value = rotation::polar_orthonormalize(&p.value);
                }
            }
            ManifoldKind::Grassmann(_, _) => {
                if grassmann::orthogonality_residual(&p.value) > REORTH_TOL {
                    p.value = grassmann::qr_orthonormalize(&p.value);
                }
            }
        }
    }

    fn check_same_manifold(&self, other: &ManifoldHandle) -> Result<()> {
        if self.kind == other.kind {
            Ok(())
        } else {
            Err(Error::Contract(format!(
                "manifold mismatch: {:?} vs {:?}",
                self.kind, other.kind
            )))
        }
    }

    fn check_same_anchor(&self, v: &Tangent, w: &Tangent) -> Result<()> {
        self.check_same_manifold(&v.base.manifold)?;
        self.check_same_manifold(&w.base.manifold)?;
        let sep = (&v.base.value - &w.base.value).norm();
        if sep > 1e-9 {
            return Err(Error::Contract(format!(
                "tangents anchored at different base points (separation {sep:.3e})"
            )));
        }
        Ok(())
    }
}

/// A manifold element, stored as a dense matrix representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub manifold: ManifoldHandle,
    pub value: DMatrix<f64>,
}

impl Point {
    /// Validates the representation invariants before wrapping:
    /// unit norm (sphere, 1e-12), orthonormality (SO(n)/Grassmann, 1e-10)
    /// and positive determinant for SO(n).
    pub fn new(manifold: ManifoldHandle, value: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = manifold.point_shape();
        if value.shape() != (rows, cols) {
            return Err(Error::Contract(format!(
                "point shape {:?} does not match manifold shape {:?}",
                value.shape(),
                (rows, cols)
            )));
        }
        match manifold.kind {
            ManifoldKind::Euclidean(_) => {}
            ManifoldKind::Sphere(_) => {
                if (value.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::Contract(format!(
                        "sphere point is not unit length: |v| = {}",
                        value.norm()
                    )));
                }
            }
            ManifoldKind::SpecialOrthogonal(_) => {
                let res = rotation::orthogonality_residual(&value);
                if res > 1e-10 {
                    return Err(Error::Contract(format!(
                        "matrix is not orthogonal: residual {res:.3e}"
                    )));
                }
                if value.determinant() <= 0.0 {
                    return Err(Error::Contract("determinant is not positive".into()));
                }
            }
            ManifoldKind::Grassmann(_, _) => {
                let res = grassmann::orthogonality_residual(&value);
                if res > 1e-10 {
                    return Err(Error::Contract(format!(
                        "columns are not orthonormal: residual {res:.3e}"
                    )));
                }
            }
        }
        Ok(Point { manifold, value })
    }
}

/// A tangent vector anchored at a base point, same matrix shape as the base.
#[derive(Debug, Clone)]
pub struct Tangent {
    pub base: Point,
    pub value: DMatrix<f64>,
}

impl Tangent {
    /// Validates the tangency invariants (xᵀv = 0 for sphere/Grassmann,
    /// x⁻¹v skew-symmetric for SO(n)) before wrapping.
    pub fn new(base: Point, value: DMatrix<f64>) -> Result<Self> {
        if value.shape() != base.value.shape() {
            return Err(Error::Contract(
                "tangent shape does not match base point".into(),
            ));
        }
        let residual = match base.manifold.kind {
            ManifoldKind::Euclidean(_) => 0.0,
            ManifoldKind::Sphere(_) => (base.value.transpose() * &value).norm(),
            ManifoldKind::SpecialOrthogonal(_) => {
                let a = base.value.transpose() * &value;
                (&a + a.transpose()).norm()
            }
            ManifoldKind::Grassmann(_, _) => (base.value.transpose() * &value).norm(),
        };
        if residual > 1e-10 {
            return Err(Error::Contract(format!(
                "vector is not tangent at the base point (residual {residual:.3e})"
            )));
        }
        Ok(Tangent { base, value })
    }

    pub fn scale(&self, t: f64) -> Tangent {
        Tangent {
            base: self.base.clone(),
            value: &self.value * t,
        }
    }

    /// Sum of two tangents at the same anchor.
    pub fn add(&self, other: &Tangent) -> Result<Tangent> {
        self.base.manifold.check_same_anchor(self, other)?;
        Ok(Tangent {
            base: self.base.clone(),
            value: &self.value + &other.value,
        })
    }

    pub fn norm(&self) -> f64 {
        self.base.manifold.norm(self)
    }
}
