//! Finite-difference variations along `X + s·f·N`, `X0 + s·y`, `t0 + s·h`.
//!
//! Round factors move by the exact radial graph `ρ = r − s·f`; polylines move
//! their vertices and re-measure arclength. The weighted volume always uses
//! the initial normal, weight and measure.

use super::{FunctionalKind, VariationSpec};
use crate::error::{Error, Result};
use crate::functionals::gaussian_normalization;
use crate::geometry::{Hypersurface, Param, PolylineCurve};
use crate::quadrature::QuadratureGrid;
use crate::vector::{axpy, compensated_sum, dist_sq, dot, norm_sq, sub};

/// Largest tolerated roundoff estimate relative to the derivative's scale.
const CANCELLATION_LIMIT: f64 = 1e-6;

enum Mover {
    /// Round factor of dimension `k` in the first `k + 1` coordinates.
    Radial { center: Vec<f64>, radius: f64, k: usize, grad_norms: Vec<f64> },
    /// Rigid translation along the constant normal (hyperplane).
    Translate,
    /// Polyline vertices moved along their normals.
    Curve { curve: PolylineCurve, vertex_speed: Vec<f64>, node_vertex: Vec<usize>, flat_weight: Vec<f64> },
}

/// Precomputed data of a deformation path.
struct Path<'a> {
    grid: &'a QuadratureGrid,
    spec: &'a VariationSpec,
    speed: Vec<f64>,
    mover: Mover,
}

impl<'a> Path<'a> {
    fn new(grid: &'a QuadratureGrid, spec: &'a VariationSpec) -> Result<Self> {
        let speed = spec.validate(grid)?;
        let mover = match grid.surface() {
            Hypersurface::Sphere(sph) => {
                let jets = spec.speed.jets_on(grid)?;
                Mover::Radial {
                    center: sph.center.clone(),
                    radius: sph.radius,
                    k: sph.n,
                    grad_norms: jets.iter().map(|j| norm_sq(&j.gradient).sqrt()).collect(),
                }
            }
            Hypersurface::Cylinder(c) => {
                let jets = spec.speed.jets_on(grid)?;
                let flat_start = c.k + 1;
                if jets.iter().any(|j| j.gradient[flat_start..].iter().any(|g| g.abs() > 1e-12)) {
                    return Err(Error::Unsupported(
                        "cylinder deformations need speeds constant along the flat factor".into(),
                    ));
                }
                if c.k == 0 {
                    Mover::Translate
                } else {
                    Mover::Radial {
                        center: vec![0.0; c.n + 1],
                        radius: c.radius,
                        k: c.k,
                        grad_norms: jets.iter().map(|j| norm_sq(&j.gradient).sqrt()).collect(),
                    }
                }
            }
            Hypersurface::Polyline(curve) => Mover::Curve {
                curve: curve.clone(),
                vertex_speed: speed.clone(),
                node_vertex: (0..curve.len()).collect(),
                flat_weight: vec![1.0; curve.len()],
            },
            Hypersurface::Product(p) => {
                let m = p.curve.len();
                let mut vertex_speed = vec![f64::NAN; m];
                let mut node_vertex = Vec::with_capacity(grid.len());
                let mut flat_weight = Vec::with_capacity(grid.len());
                for (node, f) in grid.nodes().iter().zip(&speed) {
                    let Param::ProductVertex { vertex, .. } = node.param else {
                        return Err(Error::InvalidParameter("grid does not match the curve product".into()));
                    };
                    let slot = &mut vertex_speed[vertex];
                    if slot.is_nan() {
                        *slot = *f;
                    } else if (*slot - f).abs() > 1e-12 * (1.0 + f.abs()) {
                        return Err(Error::Unsupported(
                            "curve-product deformations need speeds constant along the flat factor".into(),
                        ));
                    }
                    node_vertex.push(vertex);
                    flat_weight.push(node.weight / p.curve.dual_length(vertex));
                }
                Mover::Curve { curve: p.curve.clone(), vertex_speed, node_vertex, flat_weight }
            }
        };
        Ok(Self { grid, spec, speed, mover })
    }

    /// Deformed positions and area elements at parameter `s`.
    fn deform(&self, s: f64) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let nodes = self.grid.nodes();
        match &self.mover {
            Mover::Radial { center, radius, k, grad_norms } => {
                let mut pos = Vec::with_capacity(nodes.len());
                let mut mu = Vec::with_capacity(nodes.len());
                for ((node, f), g) in nodes.iter().zip(&self.speed).zip(grad_norms) {
                    let rho = radius - s * f;
                    let x = axpy(&node.sample.position, s * f, &node.sample.normal);
                    debug_assert!({
                        let round = sub(&x[..=*k], &center[..=*k]);
                        (norm_sq(&round).sqrt() - rho.abs()).abs() < 1e-9 * (1.0 + radius)
                    });
                    let stretch = (rho / radius).powi(*k as i32 - 1)
                        * (rho * rho + (s * radius * g).powi(2)).sqrt()
                        / radius;
                    pos.push(x);
                    mu.push(node.weight * stretch);
                }
                Ok((pos, mu))
            }
            Mover::Translate => Ok((
                nodes
                    .iter()
                    .zip(&self.speed)
                    .map(|(node, f)| axpy(&node.sample.position, s * f, &node.sample.normal))
                    .collect(),
                nodes.iter().map(|n| n.weight).collect(),
            )),
            Mover::Curve { curve, vertex_speed, node_vertex, flat_weight } => {
                let mut moved = curve.vertices.clone();
                for (i, v) in moved.iter_mut().enumerate() {
                    let nrm = curve.vertex_frame(i)?.normal;
                    v[0] += s * vertex_speed[i] * nrm[0];
                    v[1] += s * vertex_speed[i] * nrm[1];
                }
                let moved = PolylineCurve::new(moved, curve.closed)?;
                let mut pos = Vec::with_capacity(nodes.len());
                let mut mu = Vec::with_capacity(nodes.len());
                for ((node, &vi), fw) in nodes.iter().zip(node_vertex).zip(flat_weight) {
                    let mut x = node.sample.position.clone();
                    x[..2].copy_from_slice(&moved.vertices[vi]);
                    pos.push(x);
                    mu.push(moved.dual_length(vi) * fw);
                }
                Ok((pos, mu))
            }
        }
    }

    /// Functional value and the magnitude of its summed parts.
    fn functional(&self, kind: FunctionalKind, s: f64, lambda: f64) -> Result<(f64, f64)> {
        let grid = self.grid;
        let nodes = grid.nodes();
        let n = grid.surface().dim();
        let t0 = grid.scale();
        let (moves_frame, ts) = match kind {
            FunctionalKind::F | FunctionalKind::T => (true, t0 + s * self.spec.scale_velocity),
            _ => (false, t0),
        };
        if ts <= 0.0 {
            return Err(Error::InvalidParameter(format!("scale t0 + s·h = {ts} is not positive")));
        }
        let xs = if moves_frame {
            axpy(grid.center(), s, &self.spec.center_velocity)
        } else {
            grid.center().to_vec()
        };
        let (pos, mu) = self.deform(s)?;

        let area = || {
            compensated_sum(pos.iter().zip(&mu).map(|(x, m)| (-dist_sq(x, &xs) / (2.0 * ts)).exp() * m))
        };
        let volume = || {
            compensated_sum(
                nodes
                    .iter()
                    .zip(&pos)
                    .map(|(node, x)| dot(&sub(x, &xs), &node.sample.normal) * node.gaussian * node.weight),
            )
        };
        let (a, v) = match kind {
            FunctionalKind::A => (area(), 0.0),
            FunctionalKind::V => (0.0, volume()),
            FunctionalKind::J => (area(), lambda * volume()),
            FunctionalKind::T => (gaussian_normalization(n, ts) * area(), 0.0),
            FunctionalKind::F => (
                gaussian_normalization(n, ts) * area(),
                lambda * gaussian_normalization(n, t0) * (t0 / ts).sqrt() * volume(),
            ),
        };
        Ok((a + v, a.abs() + v.abs()))
    }
}

/// Functional value along the deformation at parameter `s`.
pub fn deformed_functional(
    kind: FunctionalKind,
    grid: &QuadratureGrid,
    spec: &VariationSpec,
    lambda: f64,
    s: f64,
) -> Result<f64> {
    Ok(Path::new(grid, spec)?.functional(kind, s, lambda)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericDerivative {
    /// Central difference at step `ε`.
    pub value: f64,
    /// Central difference at step `ε/2`.
    pub half_step: f64,
    /// `(4·D(ε/2) − D(ε))/3`
    pub richardson: f64,
    /// Roundoff estimate at the half step.
    pub roundoff: f64,
}

/// Central-difference derivative of order 1 or 2 at `s = 0`.
pub fn numeric_variation(
    kind: FunctionalKind,
    grid: &QuadratureGrid,
    spec: &VariationSpec,
    lambda: f64,
    eps: f64,
    order: u8,
) -> Result<f64> {
    Ok(numeric_variation_detailed(kind, grid, spec, lambda, eps, order)?.value)
}

pub fn numeric_variation_detailed(
    kind: FunctionalKind,
    grid: &QuadratureGrid,
    spec: &VariationSpec,
    lambda: f64,
    eps: f64,
    order: u8,
) -> Result<NumericDerivative> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("step {eps} must be positive")));
    }
    let path = Path::new(grid, spec)?;
    let phi = |s: f64| path.functional(kind, s, lambda);
    let (f0, mut scale) = phi(0.0)?;
    let mut diff = |h: f64| -> Result<f64> {
        let ((p, sp), (m, sm)) = (phi(h)?, phi(-h)?);
        scale = scale.max(sp).max(sm);
        Ok(match order {
            1 => (p - m) / (2.0 * h),
            2 => (p - 2.0 * f0 + m) / (h * h),
            _ => return Err(Error::InvalidParameter(format!("order {order} must be 1 or 2"))),
        })
    };
    let value = diff(eps)?;
    let half_step = diff(eps / 2.0)?;
    let roundoff = 16.0 * f64::EPSILON * scale / (eps / 2.0).powi(order as i32);
    if roundoff > CANCELLATION_LIMIT * value.abs().max(scale) {
        return Err(Error::StepTooSmall { eps, noise: roundoff });
    }
    Ok(NumericDerivative { value, half_step, richardson: (4.0 * half_step - value) / 3.0, roundoff })
}
