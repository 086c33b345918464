//! Quadrature grids against the Gaussian density `e^{−|X−X0|²/(2t0)} dμ`.
//!
//! Round factors use a uniform azimuthal rule times Gauss–Legendre in each
//! polar angle; flat factors use Gauss–Hermite nodes matched to the Gaussian;
//! closed polylines use one node per vertex weighted by its dual arclength.

pub mod rules;

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::{GeometrySample, Hypersurface, Param};
use crate::vector::{compensated_sum, dist_sq, dot, sub};
use rules::{erfc_bound, gauss_hermite, gauss_legendre};

pub const MIN_RESOLUTION: usize = 8;
/// Neglected one-dimensional Gaussian mass beyond the outermost Hermite node.
pub const TAIL_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureNode {
    pub param: Param,
    pub sample: GeometrySample,
    /// Plain area element `dμ` attributed to the node.
    pub weight: f64,
    /// `e^{−|X−X0|²/(2t0)}` at the node.
    pub gaussian: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    surface: Hypersurface,
    nodes: Vec<QuadratureNode>,
    center: Vec<f64>,
    scale: f64,
    resolution: usize,
    truncation: Option<f64>,
}

impl QuadratureGrid {
    pub fn surface(&self) -> &Hypersurface {
        &self.surface
    }

    pub fn nodes(&self) -> &[QuadratureNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Gaussian center `X0`.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Gaussian scale `t0`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Half-width of the flat-factor node span, `None` for compact surfaces.
    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn is_standard_gaussian(&self) -> bool {
        self.scale == 1.0 && self.center.iter().all(|c| *c == 0.0)
    }

    /// Same surface and resolution with another Gaussian.
    pub fn rebuild_with_gaussian(&self, center: &[f64], scale: f64) -> Result<Self> {
        build_grid_at(&self.surface, self.resolution, center, scale)
    }

    /// Same surface and Gaussian at another resolution.
    pub fn refined(&self, resolution: usize) -> Result<Self> {
        build_grid_at(&self.surface, resolution, &self.center, self.scale)
    }

    /// `Σ g(node)·dμ·(Gaussian if flagged)` with compensated summation.
    pub fn integrate_fn(&self, use_gaussian: bool, g: impl Fn(&QuadratureNode) -> f64) -> f64 {
        compensated_sum(self.nodes.iter().map(|node| {
            let w = if use_gaussian { node.weight * node.gaussian } else { node.weight };
            g(node) * w
        }))
    }

    /// `X − X0` at a node.
    pub fn offset(&self, node: &QuadratureNode) -> Vec<f64> {
        sub(&node.sample.position, &self.center)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.weight)
    }
}

/// Grid with the standard Gaussian `X0 = 0`, `t0 = 1`.
pub fn build_grid(surface: &Hypersurface, resolution: usize) -> Result<QuadratureGrid> {
    let center = vec![0.0; surface.ambient_dim()];
    build_grid_at(surface, resolution, &center, 1.0)
}

pub fn build_grid_at(
    surface: &Hypersurface,
    resolution: usize,
    center: &[f64],
    scale: f64,
) -> Result<QuadratureGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::ResolutionTooLow { got: resolution, min: MIN_RESOLUTION });
    }
    if center.len() != surface.ambient_dim() {
        return Err(Error::InvalidParameter(format!(
            "Gaussian center has {} coordinates, expected {}",
            center.len(),
            surface.ambient_dim()
        )));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter(format!("Gaussian scale {scale} must be positive")));
    }

    let mut raw: Vec<(Param, f64)> = Vec::new();
    let mut truncation = None;
    match surface {
        Hypersurface::Sphere(s) => {
            let rn = s.radius.powi(s.n as i32);
            for (dir, w) in unit_sphere_rule(s.n, resolution) {
                raw.push((Param::Sphere { direction: dir }, rn * w));
            }
        }
        Hypersurface::Cylinder(c) => {
            let round: Vec<(Vec<f64>, f64)> = if c.k == 0 {
                vec![(vec![1.0], 1.0)]
            } else {
                let rk = c.radius.powi(c.k as i32);
                unit_sphere_rule(c.k, resolution)
                    .into_iter()
                    .map(|(d, w)| (d, rk * w))
                    .collect()
            };
            let flat = flat_rule(&center[c.k + 1..], scale, resolution);
            truncation = Some(flat.half_width);
            for (dir, wr) in &round {
                for (z, wz) in &flat.nodes {
                    raw.push((Param::Cylinder { direction: dir.clone(), flat: z.clone() }, wr * wz));
                }
            }
        }
        Hypersurface::Polyline(curve) => {
            if !curve.closed {
                return Err(Error::Unsupported("quadrature on open polylines".into()));
            }
            for i in 0..curve.len() {
                raw.push((Param::Vertex(i), curve.dual_length(i)));
            }
        }
        Hypersurface::Product(p) => {
            let flat = flat_rule(&center[2..], scale, resolution);
            truncation = Some(flat.half_width);
            for i in 0..p.curve.len() {
                let l = p.curve.dual_length(i);
                for (z, wz) in &flat.nodes {
                    raw.push((Param::ProductVertex { vertex: i, flat: z.clone() }, l * wz));
                }
            }
        }
    }

    let nodes = raw
        .into_iter()
        .map(|(param, weight)| {
            let sample = surface.evaluate(&param)?;
            let gaussian = (-dist_sq(&sample.position, center) / (2.0 * scale)).exp();
            Ok(QuadratureNode { param, sample, weight, gaussian })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(QuadratureGrid {
        surface: surface.clone(),
        nodes,
        center: center.to_vec(),
        scale,
        resolution,
        truncation,
    })
}

/// Nodes and weights of `dσ` on the unit sphere `S^k ⊂ R^{k+1}`.
pub fn unit_sphere_rule(k: usize, resolution: usize) -> Vec<(Vec<f64>, f64)> {
    if k == 1 {
        let m = resolution;
        let w = std::f64::consts::TAU / m as f64;
        return (0..m)
            .map(|j| {
                let phi = std::f64::consts::TAU * j as f64 / m as f64;
                (vec![phi.cos(), phi.sin()], w)
            })
            .collect();
    }
    let p = (resolution / 2).max(4);
    let lower = unit_sphere_rule(k - 1, resolution);
    let polar = polar_rule(k, p);
    let mut out = Vec::with_capacity(polar.len() * lower.len());
    for (c, s, wchi) in polar {
        for (dir, wl) in &lower {
            let mut d = Vec::with_capacity(k + 1);
            d.push(c);
            d.extend(dir.iter().map(|v| s * v));
            out.push((d, wchi * wl));
        }
    }
    out
}

/// `(cos χ, sin χ, w)` for `∫_0^π g(χ) sin^{k−1}χ dχ`.
///
/// `k = 2`: Gauss–Legendre in `cos χ`; `k = 3`: Gauss–Chebyshev of the
/// second kind in `cos χ`; higher `k`: Gauss–Legendre in `χ`.
fn polar_rule(k: usize, p: usize) -> Vec<(f64, f64, f64)> {
    match k {
        2 => {
            let (t, w) = gauss_legendre(p);
            t.iter().zip(&w).map(|(t, w)| (*t, (1.0 - t * t).sqrt(), *w)).collect()
        }
        3 => (1..=p)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / (p + 1) as f64;
                let (s, c) = a.sin_cos();
                (c, s, std::f64::consts::PI / (p + 1) as f64 * s * s)
            })
            .collect(),
        _ => {
            let (x, wx) = gauss_legendre(p);
            x.iter()
                .zip(&wx)
                .map(|(xi, wi)| {
                    let chi = std::f64::consts::FRAC_PI_2 * (xi + 1.0);
                    let (s, c) = chi.sin_cos();
                    (c, s, std::f64::consts::FRAC_PI_2 * wi * s.powi(k as i32 - 1))
                })
                .collect()
        }
    }
}

struct FlatRule {
    nodes: Vec<(Vec<f64>, f64)>,
    half_width: f64,
}

/// Hermite order for flat factors at a given resolution.
pub fn hermite_order(resolution: usize) -> usize {
    (resolution / 2).clamp(20, 64)
}

/// Tensor Gauss–Hermite rule for `∫_{R^m} g(z) dz`, nodes centered at `center`
/// and spread to match `e^{−|z−center|²/(2t0)}`.
fn flat_rule(center: &[f64], scale: f64, resolution: usize) -> FlatRule {
    let m = center.len();
    let q = hermite_order(resolution);
    let (xi, w) = gauss_hermite(q);
    debug_assert!(erfc_bound(xi[q - 1]) <= TAIL_LIMIT);
    let stretch = (2.0 * scale).sqrt();
    let one_d: Vec<(f64, f64)> = xi
        .iter()
        .zip(&w)
        .map(|(x, w)| (stretch * x, stretch * w * (x * x).exp()))
        .collect();
    let mut nodes: Vec<(Vec<f64>, f64)> = vec![(Vec::with_capacity(m), 1.0)];
    for c in center {
        let mut next = Vec::with_capacity(nodes.len() * q);
        for (z, wz) in &nodes {
            for (x, wx) in &one_d {
                let mut z2 = z.clone();
                z2.push(c + x);
                next.push((z2, wz * wx));
            }
        }
        nodes = next;
    }
    FlatRule { nodes, half_width: stretch * xi[q - 1] }
}

/// `Σ field·dμ·(Gaussian if flagged)`.
pub fn integrate(grid: &QuadratureGrid, field: &[f64], use_gaussian: bool) -> Result<f64> {
    if field.len() != grid.len() {
        return Err(Error::LengthMismatch { got: field.len(), expected: grid.len() });
    }
    Ok(compensated_sum(grid.nodes().iter().zip(field).map(|(node, f)| {
        let w = if use_gaussian { node.weight * node.gaussian } else { node.weight };
        f * w
    })))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationByParts {
    /// `∫ u ℒv w dμ`
    pub drift_side: f64,
    /// `−∫ ⟨∇u, ∇v⟩ w dμ`
    pub gradient_side: f64,
    pub residual: f64,
}

/// Weighted integration by parts `∫ u ℒv w = −∫ ⟨∇u, ∇v⟩ w` with
/// `ℒv = Δv − ⟨(X−X0)/t0, ∇v⟩`.
pub fn integration_by_parts_check(
    grid: &QuadratureGrid,
    u: &ScalarField,
    v: &ScalarField,
) -> Result<IntegrationByParts> {
    let ju = u.jets_on(grid)?;
    let jv = v.jets_on(grid)?;
    let mut lhs = Vec::with_capacity(grid.len());
    let mut rhs = Vec::with_capacity(grid.len());
    for ((node, a), b) in grid.nodes().iter().zip(&ju).zip(&jv) {
        let x = grid.offset(node);
        lhs.push(a.value * b.drift_laplacian(&x, grid.scale()));
        rhs.push(-dot(&a.gradient, &b.gradient));
    }
    let drift_side = integrate(grid, &lhs, true)?;
    let gradient_side = integrate(grid, &rhs, true)?;
    Ok(IntegrationByParts { drift_side, gradient_side, residual: (drift_side - gradient_side).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField;
    use std::f64::consts::PI;

    fn total(grid: &QuadratureGrid, gaussian: bool) -> f64 {
        grid.integrate_fn(gaussian, |_| 1.0)
    }

    #[test]
    fn circle_circumference() {
        let g = build_grid(&Hypersurface::sphere(1, 1.0).unwrap(), 64).unwrap();
        assert!((g.weights().sum::<f64>() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_area() {
        let g = build_grid(&Hypersurface::sphere(2, 1.0).unwrap(), 32).unwrap();
        assert!((total(&g, false) - 4.0 * PI).abs() < 1e-8);
        let g3 = build_grid(&Hypersurface::sphere(3, 2.0).unwrap(), 16).unwrap();
        assert!((total(&g3, false) - 2.0 * PI * PI * 8.0).abs() < 1e-10);
    }

    #[test]
    fn cylinder_gaussian_total() {
        let g = build_grid(&Hypersurface::cylinder(2, 1, 1.0).unwrap(), 64).unwrap();
        let want = 2.0 * PI * (-0.5f64).exp() * (2.0 * PI).sqrt();
        assert!((total(&g, true) - want).abs() < 1e-8);
    }

    #[test]
    fn constant_and_odd_integrals() {
        let g = build_grid(&Hypersurface::sphere(1, 1.0).unwrap(), 64).unwrap();
        assert!((total(&g, true) - 2.0 * PI * (-0.5f64).exp()).abs() < 1e-12);
        let g2 = build_grid(&Hypersurface::sphere(2, 1.3).unwrap(), 32).unwrap();
        let f = ScalarField::NormalComponent(vec![0.3, -1.0, 0.7]).evaluate_on(&g2).unwrap();
        assert!(integrate(&g2, &f, true).unwrap().abs() < 1e-10);
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = build_grid(&Hypersurface::sphere(1, 1.0).unwrap(), 16).unwrap();
        assert!(matches!(integrate(&g, &[1.0; 3], true), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn resolution_floor() {
        let s = Hypersurface::sphere(1, 1.0).unwrap();
        assert!(matches!(build_grid(&s, 4), Err(Error::ResolutionTooLow { .. })));
    }

    #[test]
    fn off_center_gaussian_on_hyperplane() {
        // ∫_R e^{−(z−z0)²/(2t0)} dz = √(2π t0), times e^{−(r−x0)²/(2t0)} from the normal offset.
        let plane = Hypersurface::cylinder(1, 0, 0.5).unwrap();
        let g = build_grid_at(&plane, 32, &[0.2, 1.0], 0.7).unwrap();
        let want = (2.0 * PI * 0.7f64).sqrt() * (-(0.3f64).powi(2) / 1.4).exp();
        assert!((total(&g, true) - want).abs() < 1e-12);
    }

    #[test]
    fn truncation_invariance() {
        let cyl = Hypersurface::cylinder(2, 1, 1.0).unwrap();
        let f = ScalarField::SquaredNorm;
        let a = build_grid(&cyl, 40).unwrap();
        let b = build_grid(&cyl, 128).unwrap();
        assert!(b.truncation().unwrap() > a.truncation().unwrap());
        let ia = integrate(&a, &f.evaluate_on(&a).unwrap(), true).unwrap();
        let ib = integrate(&b, &f.evaluate_on(&b).unwrap(), true).unwrap();
        assert!((ia - ib).abs() <= 1e-10 * ib.abs());
    }

    #[test]
    fn refinement_reduces_error() {
        // Off-center Gaussian on S²(1): smooth non-polynomial integrand.
        let s = Hypersurface::sphere(2, 1.0).unwrap();
        let c = [0.4, 0.1, -0.3];
        let err = |res: usize| {
            let g = build_grid_at(&s, res, &c, 0.5).unwrap();
            let exact = {
                // ∫_{S²} e^{−|ω−c|²/(2t)} dσ = 2π e^{−(1+|c|²)/(2t)} · 2 sinh(|c|/t)/(|c|/t)
                let cn = crate::vector::norm(&c);
                let a = cn / 0.5;
                2.0 * PI * (-(1.0 + cn * cn) / 1.0).exp() * 2.0 * a.sinh() / a
            };
            (total(&g, true) - exact).abs()
        };
        let (e1, e2) = (err(8), err(16));
        assert!(e2 * 4.0 <= e1 || e2 < 1e-14, "{e1} -> {e2}");
    }

    #[test]
    fn ibp_eigenfunction_and_constants() {
        let s = Hypersurface::sphere(2, 2f64.sqrt()).unwrap();
        let g = build_grid(&s, 32).unwrap();
        let z = ScalarField::NormalComponent(vec![0.2, 0.5, -1.0]);
        assert!(integration_by_parts_check(&g, &z, &z).unwrap().residual <= 1e-8);
        let one = ScalarField::Constant(1.0);
        let r = integration_by_parts_check(&g, &one, &ScalarField::SquaredNorm).unwrap();
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn ibp_heights_on_circle() {
        // u = v = ⟨X,a⟩ on S¹(1), a = e₁: ∫u ℒv w = −∫cos²θ·2 e^{−1/2}... both sides equal −π e^{−1/2}·|a|² (|a^T|² integrated).
        let g = build_grid(&Hypersurface::sphere(1, 1.0).unwrap(), 64).unwrap();
        let h = ScalarField::Height(vec![1.0, 0.0]);
        let r = integration_by_parts_check(&g, &h, &h).unwrap();
        let want = -PI * (-0.5f64).exp();
        assert!((r.gradient_side - want).abs() < 1e-12);
        assert!((r.drift_side - want).abs() < 1e-12);
    }
}
