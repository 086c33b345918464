//! Hypersurface families and pointwise geometry.
//!
//! Orientation: on the origin-centered round sphere the normal points inward,
//! `N = −X/r`, so `H = n/r > 0` and `⟨X, N⟩ = −r`. Curves use `N = J·T` with
//! `J` the +90° rotation, so counterclockwise convex curves have `κ > 0`.

mod analytic;
mod polyline;

pub use analytic::{Cylinder, Sphere};
pub use polyline::{CurveProduct, PolylineCurve};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::vector::{dot, sub};

/// Point on a hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    /// Unit direction from the center (length `n + 1`).
    Sphere { direction: Vec<f64> },
    /// Unit direction in the round factor (length `k + 1`) and flat coordinates (length `n − k`).
    /// For `k = 0` the direction is `[1.0]`.
    Cylinder { direction: Vec<f64>, flat: Vec<f64> },
    /// Vertex of a polyline.
    Vertex(usize),
    /// Vertex of the base curve and flat coordinates of a curve product.
    ProductVertex { vertex: usize, flat: Vec<f64> },
}

/// Pointwise geometry: position, unit normal, curvature invariants and a
/// principal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySample {
    pub position: Vec<f64>,
    pub normal: Vec<f64>,
    /// Sum of principal curvatures.
    pub mean_curvature: f64,
    /// Squared norm of the second fundamental form.
    pub squared_norm: f64,
    /// Cubic trace `Σ κᵢ³`.
    pub cubic_trace: f64,
    pub principal_curvatures: Vec<f64>,
    /// Orthonormal tangent vectors, one per principal curvature.
    pub principal_directions: Vec<Vec<f64>>,
}

impl GeometrySample {
    pub fn from_principal(
        position: Vec<f64>,
        normal: Vec<f64>,
        principal_curvatures: Vec<f64>,
        principal_directions: Vec<Vec<f64>>,
    ) -> Self {
        let mean_curvature = principal_curvatures.iter().sum();
        let squared_norm = principal_curvatures.iter().map(|k| k * k).sum();
        let cubic_trace = principal_curvatures.iter().map(|k| k * k * k).sum();
        Self {
            position,
            normal,
            mean_curvature,
            squared_norm,
            cubic_trace,
            principal_curvatures,
            principal_directions,
        }
    }

    pub fn dim(&self) -> usize {
        self.principal_curvatures.len()
    }

    /// Same point with the opposite orientation.
    pub fn flipped(&self) -> Self {
        Self::from_principal(
            self.position.clone(),
            self.normal.iter().map(|x| -x).collect(),
            self.principal_curvatures.iter().map(|k| -k).collect(),
            self.principal_directions.clone(),
        )
    }

    /// `⟨(X − X0)/t0, N⟩ + H`
    pub fn lambda_value(&self, center: &[f64], scale: f64) -> f64 {
        dot(&sub(&self.position, center), &self.normal) / scale + self.mean_curvature
    }

    /// Tangential projection of an ambient vector.
    pub fn tangential(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for e in &self.principal_directions {
            let c = dot(v, e);
            for (o, ei) in out.iter_mut().zip(e) {
                *o += c * ei;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hypersurface {
    Sphere(Sphere),
    Cylinder(Cylinder),
    Polyline(PolylineCurve),
    Product(CurveProduct),
}

impl Hypersurface {
    /// Round sphere `S^n(r)` centered at the origin.
    pub fn sphere(n: usize, radius: f64) -> Result<Self> {
        Ok(Self::Sphere(Sphere::new(n, radius, None)?))
    }

    pub fn sphere_at(n: usize, radius: f64, center: Vec<f64>) -> Result<Self> {
        Ok(Self::Sphere(Sphere::new(n, radius, Some(center))?))
    }

    /// `S^k(r) × R^{n−k}`; for `k = 0` the single sheet `{x₁ = r}`.
    pub fn cylinder(n: usize, k: usize, radius: f64) -> Result<Self> {
        Ok(Self::Cylinder(Cylinder::new(n, k, radius)?))
    }

    /// Hyperplane `{x₁ = offset}` in `R^{n+1}`, `offset ≥ 0`.
    pub fn hyperplane(n: usize, offset: f64) -> Result<Self> {
        Ok(Self::Cylinder(Cylinder::hyperplane(n, offset)?))
    }

    pub fn polyline(curve: PolylineCurve) -> Self {
        Self::Polyline(curve)
    }

    /// Intrinsic dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            Self::Sphere(s) => s.n,
            Self::Cylinder(c) => c.n,
            Self::Polyline(_) => 1,
            Self::Product(p) => 1 + p.flat_dim,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim() + 1
    }

    /// λ in closed form when the family is known to be a λ-hypersurface
    /// with `X0 = 0`, `t0 = 1`.
    pub fn lambda_exact(&self) -> Option<f64> {
        match self {
            Self::Sphere(s) => s.lambda_exact(),
            Self::Cylinder(c) => Some(c.lambda_exact()),
            Self::Polyline(c) => c.lambda,
            Self::Product(p) => p.curve.lambda,
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            Self::Sphere(_) | Self::Polyline(_) => true,
            Self::Cylinder(c) => c.k == c.n,
            Self::Product(_) => false,
        }
    }

    /// Number of flat (non-compact) directions.
    pub fn flat_dim(&self) -> usize {
        match self {
            Self::Sphere(_) | Self::Polyline(_) => 0,
            Self::Cylinder(c) => c.n - c.k,
            Self::Product(p) => p.flat_dim,
        }
    }

    /// Whether pointwise geometry is exact rather than a discrete estimate.
    pub fn is_analytic(&self) -> bool {
        matches!(self, Self::Sphere(_) | Self::Cylinder(_))
    }

    pub fn evaluate(&self, p: &Param) -> Result<GeometrySample> {
        match (self, p) {
            (Self::Sphere(s), Param::Sphere { direction }) => s.sample(direction),
            (Self::Cylinder(c), Param::Cylinder { direction, flat }) => c.sample(direction, flat),
            (Self::Polyline(c), Param::Vertex(i)) => c.sample(*i),
            (Self::Product(pr), Param::ProductVertex { vertex, flat }) => pr.sample(*vertex, flat),
            _ => Err(Error::InvalidParameter(format!(
                "parameter {p:?} does not belong to {}",
                self.describe()
            ))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Sphere(s) => {
                if s.center.iter().all(|c| *c == 0.0) {
                    format!("S^{}({})", s.n, s.radius)
                } else {
                    format!("S^{}({}) centered at {:?}", s.n, s.radius, s.center)
                }
            }
            Self::Cylinder(c) if c.k == 0 => format!("hyperplane x1={} in R^{}", c.radius, c.n + 1),
            Self::Cylinder(c) if c.k == c.n => format!("S^{}({})", c.k, c.radius),
            Self::Cylinder(c) => format!("S^{}({})xR^{}", c.k, c.radius, c.n - c.k),
            Self::Polyline(c) => format!(
                "{} polyline with {} vertices",
                if c.closed { "closed" } else { "open" },
                c.len()
            ),
            Self::Product(p) => format!("curve({} vertices)xR^{}", p.curve.len(), p.flat_dim),
        }
    }
}

/// `|S^n| = 2π^{(n+1)/2} / Γ((n+1)/2)`
pub fn unit_sphere_area(n: usize) -> f64 {
    (n + 1) as f64 * unit_ball_volume(n + 1)
}

/// Volume of the unit ball in `R^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    let mut v = if m % 2 == 1 { 2.0 } else { 1.0 };
    let mut k = m % 2;
    while k < m {
        k += 2;
        v *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v
}

/// Pointwise residual `⟨(X − X0)/t0, N⟩ + H − λ` at every grid node and its sup norm.
pub fn lambda_residual(grid: &QuadratureGrid, center: &[f64], scale: f64, lambda: f64) -> (Vec<f64>, f64) {
    let field: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|node| node.sample.lambda_value(center, scale) - lambda)
        .collect();
    let sup = field.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    (field, sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_lambda_examples() {
        let s = Hypersurface::sphere(2, 2f64.sqrt()).unwrap();
        assert!(s.lambda_exact().unwrap().abs() < 1e-15);
        assert_eq!(Hypersurface::sphere(2, 1.0).unwrap().lambda_exact(), Some(1.0));
        let c = Hypersurface::sphere(1, 2.0).unwrap();
        let g = c.evaluate(&Param::Sphere { direction: vec![0.6, 0.8] }).unwrap();
        assert!((g.mean_curvature - 0.5).abs() < 1e-15);
        assert!((dot(&g.position, &g.normal) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_radius_and_dimension() {
        assert!(Hypersurface::sphere(0, 1.0).is_err());
        assert!(Hypersurface::sphere(2, 0.0).is_err());
        assert!(Hypersurface::sphere(2, -1.0).is_err());
        assert!(Hypersurface::cylinder(2, 3, 1.0).is_err());
    }

    #[test]
    fn cylinder_lambda_examples() {
        assert!(Hypersurface::cylinder(2, 1, 1.0).unwrap().lambda_exact().unwrap().abs() < 1e-15);
        assert_eq!(Hypersurface::cylinder(3, 2, 1.0).unwrap().lambda_exact(), Some(1.0));
        let plane = Hypersurface::cylinder(2, 0, 1.5).unwrap();
        assert_eq!(plane.lambda_exact(), Some(-1.5));
        let g = plane
            .evaluate(&Param::Cylinder { direction: vec![1.0], flat: vec![0.3, -2.0] })
            .unwrap();
        assert_eq!(g.mean_curvature, 0.0);
        assert!((dot(&g.position, &g.normal) + 1.5).abs() < 1e-15);
    }

    #[test]
    fn curvature_invariants() {
        let s = Hypersurface::sphere(2, 1.0).unwrap();
        let g = s.evaluate(&Param::Sphere { direction: vec![0.0, 0.0, 1.0] }).unwrap();
        assert_eq!((g.mean_curvature, g.squared_norm, g.cubic_trace), (2.0, 2.0, 2.0));
        let c = Hypersurface::cylinder(2, 1, 1.0).unwrap();
        let g = c
            .evaluate(&Param::Cylinder { direction: vec![1.0, 0.0], flat: vec![0.5] })
            .unwrap();
        assert_eq!(g.principal_curvatures, vec![1.0, 0.0]);
        assert_eq!((g.mean_curvature, g.squared_norm, g.cubic_trace), (1.0, 1.0, 1.0));
    }

    #[test]
    fn flip_round_trip_restores_sample() {
        let c = Hypersurface::cylinder(3, 2, 1.3).unwrap();
        let g = c
            .evaluate(&Param::Cylinder { direction: vec![0.0, 0.6, 0.8], flat: vec![0.1] })
            .unwrap();
        assert_eq!(g.flipped().flipped(), g);
        let flipped = g.flipped().lambda_value(&[0.0; 4], 1.0);
        assert_eq!(flipped, -g.lambda_value(&[0.0; 4], 1.0));
    }

    #[test]
    fn mismatched_parameter_rejected() {
        let s = Hypersurface::sphere(2, 1.0).unwrap();
        assert!(s.evaluate(&Param::Vertex(0)).is_err());
    }
}
