//! Scalar test fields on hypersurfaces with first and second derivative data.

use crate::error::{Error, Result};
use crate::geometry::{GeometrySample, Hypersurface, Param};
use crate::quadrature::{QuadratureGrid, QuadratureNode};
use crate::vector::{axpy, dot, norm_sq, sub};

/// Value, tangential gradient (as an ambient vector) and Laplace–Beltrami.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
}

impl FieldJet {
    fn zero(dim: usize) -> Self {
        Self { value: 0.0, gradient: vec![0.0; dim], laplacian: 0.0 }
    }

    /// `Δv − ⟨offset/scale, ∇v⟩` where `offset = X − X0`.
    pub fn drift_laplacian(&self, offset: &[f64], scale: f64) -> f64 {
        self.laplacian - dot(offset, &self.gradient) / scale
    }
}

/// Quadratic harmonic `p(ω) = ωᵀQω`, `Q` symmetric and traceless, restricted
/// to a round sphere through its unit outward direction. It is an
/// eigenfunction of the Laplacian with eigenvalue `2(n+1)/r²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHarmonic {
    matrix: Vec<Vec<f64>>,
}

impl QuadraticHarmonic {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let d = matrix.len();
        if d < 2 || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidParameter("harmonic matrix must be square, size ≥ 2".into()));
        }
        let scale = matrix.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
        for i in 0..d {
            for j in 0..i {
                if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter("harmonic matrix must be symmetric".into()));
                }
            }
        }
        let trace: f64 = (0..d).map(|i| matrix[i][i]).sum();
        if trace.abs() > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!("harmonic matrix trace {trace} must vanish")));
        }
        Ok(Self { matrix })
    }

    /// `ω₁ω₂` style harmonic `(e_i e_jᵀ + e_j e_iᵀ)/2` in `R^d`, `i ≠ j`.
    pub fn product(d: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= d || j >= d {
            return Err(Error::InvalidParameter("product harmonic needs two distinct axes".into()));
        }
        let mut m = vec![vec![0.0; d]; d];
        m[i][j] = 0.5;
        m[j][i] = 0.5;
        Self::new(m)
    }

    /// `ω_i² − ω_j²` in `R^d`, `i ≠ j`.
    pub fn difference_of_squares(d: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= d || j >= d {
            return Err(Error::InvalidParameter("harmonic needs two distinct axes".into()));
        }
        let mut m = vec![vec![0.0; d]; d];
        m[i][i] = 1.0;
        m[j][j] = -1.0;
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| dot(row, v)).collect()
    }

    pub fn value(&self, omega: &[f64]) -> f64 {
        dot(omega, &self.apply(omega))
    }
}

/// Normal speeds and test functions used by the variation, flow and identity code.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Constant(f64),
    /// `⟨X, a⟩`
    Height(Vec<f64>),
    /// `⟨N, a⟩`
    NormalComponent(Vec<f64>),
    /// `|X|²`
    SquaredNorm,
    /// Degree-2 harmonic of the outward direction on a round sphere.
    Harmonic(QuadraticHarmonic),
    /// Linear combination.
    Sum(Vec<(f64, ScalarField)>),
    /// Values at grid nodes, no derivative data.
    Sampled(Vec<f64>),
}

impl ScalarField {
    pub fn zero() -> Self {
        Self::Constant(0.0)
    }

    pub fn is_sampled(&self) -> bool {
        match self {
            Self::Sampled(_) => true,
            Self::Sum(terms) => terms.iter().any(|(_, f)| f.is_sampled()),
            _ => false,
        }
    }

    /// Values at the grid nodes.
    pub fn evaluate_on(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        match self {
            Self::Sampled(v) => {
                if v.len() != grid.len() {
                    return Err(Error::LengthMismatch { got: v.len(), expected: grid.len() });
                }
                Ok(v.clone())
            }
            Self::Sum(terms) => {
                let mut out = vec![0.0; grid.len()];
                for (c, f) in terms {
                    for (o, v) in out.iter_mut().zip(f.evaluate_on(grid)?) {
                        *o += c * v;
                    }
                }
                Ok(out)
            }
            _ => grid
                .nodes()
                .iter()
                .map(|node| self.value_at(grid.surface(), &node.param, &node.sample))
                .collect(),
        }
    }

    /// Value at a point given its geometry. Sampled fields have no pointwise value.
    pub fn value_at(&self, surface: &Hypersurface, param: &Param, sample: &GeometrySample) -> Result<f64> {
        let x = &sample.position;
        Ok(match self {
            Self::Constant(c) => *c,
            Self::Height(a) => dot(x, checked(a, x.len())?),
            Self::NormalComponent(a) => dot(&sample.normal, checked(a, x.len())?),
            Self::SquaredNorm => norm_sq(x),
            Self::Harmonic(q) => {
                round_sphere(surface, q)?;
                q.value(&outward(sample))
            }
            Self::Sum(terms) => {
                let mut s = 0.0;
                for (c, f) in terms {
                    s += c * f.value_at(surface, param, sample)?;
                }
                s
            }
            Self::Sampled(_) => {
                return Err(Error::MissingDerivatives("sampled field has no pointwise formula".into()))
            }
        })
    }

    /// Jet at a quadrature node.
    pub fn jet(&self, surface: &Hypersurface, node: &QuadratureNode) -> Result<FieldJet> {
        let sample = &node.sample;
        let x = &sample.position;
        let dim = x.len();
        Ok(match self {
            Self::Constant(c) => FieldJet { value: *c, ..FieldJet::zero(dim) },
            Self::Height(a) => {
                let a = checked(a, dim)?;
                FieldJet {
                    value: dot(x, a),
                    gradient: sample.tangential(a),
                    laplacian: sample.mean_curvature * dot(&sample.normal, a),
                }
            }
            Self::SquaredNorm => FieldJet {
                value: norm_sq(x),
                gradient: sample.tangential(&x.iter().map(|v| 2.0 * v).collect::<Vec<_>>()),
                laplacian: 2.0 * sample.principal_curvatures.len() as f64
                    + 2.0 * sample.mean_curvature * dot(x, &sample.normal),
            },
            Self::NormalComponent(a) => {
                let a = checked(a, dim)?;
                // ∇⟨N,a⟩ = −Σ κᵢ⟨a,eᵢ⟩eᵢ,  Δ⟨N,a⟩ = −⟨∇H,a⟩ − S⟨N,a⟩
                let mut gradient = vec![0.0; dim];
                for (k, e) in sample.principal_curvatures.iter().zip(&sample.principal_directions) {
                    gradient = axpy(&gradient, -k * dot(a, e), e);
                }
                let grad_h = mean_curvature_gradient(surface, &node.param, sample)?;
                let value = dot(&sample.normal, a);
                FieldJet { value, gradient, laplacian: -dot(&grad_h, a) - sample.squared_norm * value }
            }
            Self::Harmonic(q) => {
                let r = round_sphere(surface, q)?;
                let n = sample.principal_curvatures.len() as f64;
                let omega = outward(sample);
                let value = q.value(&omega);
                // Ambient gradient of ωᵀQω with ω = (X − c)/r is 2Qω/r.
                let grad = q.apply(&omega).iter().map(|v| 2.0 * v / r).collect::<Vec<_>>();
                FieldJet {
                    value,
                    gradient: sample.tangential(&grad),
                    laplacian: -2.0 * (n + 1.0) / (r * r) * value,
                }
            }
            Self::Sum(terms) => {
                let mut acc = FieldJet::zero(dim);
                for (c, f) in terms {
                    let j = f.jet(surface, node)?;
                    acc.value += c * j.value;
                    acc.gradient = axpy(&acc.gradient, *c, &j.gradient);
                    acc.laplacian += c * j.laplacian;
                }
                acc
            }
            Self::Sampled(_) => {
                return Err(Error::MissingDerivatives("sampled field has no derivative data".into()))
            }
        })
    }

    pub fn jets_on(&self, grid: &QuadratureGrid) -> Result<Vec<FieldJet>> {
        grid.nodes().iter().map(|node| self.jet(grid.surface(), node)).collect()
    }
}

fn checked(a: &[f64], dim: usize) -> Result<&[f64]> {
    if a.len() == dim {
        Ok(a)
    } else {
        Err(Error::InvalidParameter(format!("vector has {} coordinates, expected {dim}", a.len())))
    }
}

/// Radius of the round sphere carrying a harmonic.
fn round_sphere(surface: &Hypersurface, q: &QuadraticHarmonic) -> Result<f64> {
    match surface {
        Hypersurface::Sphere(s) if q.dim() == s.n + 1 => Ok(s.radius),
        Hypersurface::Sphere(_) => Err(Error::InvalidParameter("harmonic dimension mismatch".into())),
        _ => Err(Error::Unsupported("harmonic fields are defined on round spheres only".into())),
    }
}

fn outward(sample: &GeometrySample) -> Vec<f64> {
    sample.normal.iter().map(|v| -v).collect()
}

/// `∇H` as an ambient vector: zero on the analytic families, estimated from
/// neighbouring vertex curvatures on discrete curves.
pub fn mean_curvature_gradient(surface: &Hypersurface, param: &Param, sample: &GeometrySample) -> Result<Vec<f64>> {
    let dim = sample.position.len();
    let (curve, vertex) = match (surface, param) {
        (Hypersurface::Polyline(c), Param::Vertex(i)) => (c, *i),
        (Hypersurface::Product(p), Param::ProductVertex { vertex, .. }) => (&p.curve, *vertex),
        _ => return Ok(vec![0.0; dim]),
    };
    let dk = curvature_derivatives(curve, vertex)?.0;
    Ok(sample.principal_directions[0].iter().map(|t| dk * t).collect())
}

/// `(κ′, κ″)` at a vertex of a closed curve.
pub fn curvature_derivatives(curve: &crate::geometry::PolylineCurve, vertex: usize) -> Result<(f64, f64)> {
    let (prev, next) = curve.neighbors(vertex)?;
    curve.stencil(vertex, [curve.curvature(prev)?, curve.curvature(vertex)?, curve.curvature(next)?])
}

/// `X − X0` helper for callers holding only a sample.
pub fn offset(sample: &GeometrySample, center: &[f64]) -> Vec<f64> {
    sub(&sample.position, center)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;

    #[test]
    fn harmonic_validation() {
        assert!(QuadraticHarmonic::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(QuadraticHarmonic::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).is_err());
        assert!(QuadraticHarmonic::product(3, 0, 1).is_ok());
    }

    #[test]
    fn harmonic_is_laplace_eigenfunction_on_sphere() {
        let s = Hypersurface::sphere(2, 1.5).unwrap();
        let g = build_grid(&s, 16).unwrap();
        let f = ScalarField::Harmonic(QuadraticHarmonic::difference_of_squares(3, 0, 2).unwrap());
        for node in g.nodes() {
            let j = f.jet(&s, node).unwrap();
            assert!((j.laplacian + 6.0 / 2.25 * j.value).abs() < 1e-12);
            // tangential gradient matches the ambient-function identity on the round sphere
            assert!(dot(&j.gradient, &node.sample.normal).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_component_eigenfunction() {
        let s = Hypersurface::sphere(3, 0.8).unwrap();
        let g = build_grid(&s, 12).unwrap();
        let f = ScalarField::NormalComponent(vec![1.0, -0.5, 0.2, 0.0]);
        for node in g.nodes() {
            let j = f.jet(&s, node).unwrap();
            assert!((j.laplacian + 3.0 / 0.64 * j.value).abs() < 1e-12);
            // sphere: X ∥ N so the drift term vanishes
            assert!(dot(&node.sample.position, &j.gradient).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_field_has_no_jet() {
        let s = Hypersurface::sphere(1, 1.0).unwrap();
        let g = build_grid(&s, 16).unwrap();
        let f = ScalarField::Sampled(vec![0.0; 16]);
        assert!(matches!(f.jets_on(&g), Err(Error::MissingDerivatives(_))));
        assert_eq!(f.evaluate_on(&g).unwrap().len(), 16);
    }

    #[test]
    fn harmonic_rejected_off_sphere() {
        let c = Hypersurface::cylinder(2, 1, 1.0).unwrap();
        let g = build_grid(&c, 16).unwrap();
        let f = ScalarField::Harmonic(QuadraticHarmonic::product(3, 0, 1).unwrap());
        assert!(matches!(f.evaluate_on(&g), Err(Error::Unsupported(_))));
    }
}
