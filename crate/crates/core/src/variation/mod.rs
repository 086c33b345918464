//! Normal variations `(f, y, h)`: the speed `f` of `X + s·f·N`, the center
//! velocity `y` and the scale velocity `h`. Analytic first and second
//! variations are evaluated by quadrature; `numeric` differentiates the
//! functionals along explicitly deformed geometry.

mod numeric;

pub use numeric::{deformed_functional, numeric_variation, numeric_variation_detailed, NumericDerivative};

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::functionals::{gaussian_normalization, mean_lambda, weighted_area};
use crate::geometry::Hypersurface;
use crate::quadrature::{integrate, QuadratureGrid};
use crate::vector::{dot, norm_sq};

/// Relative tolerance on `∫ f w` for the volume-preserving constraint.
pub const VOLUME_PRESERVING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalKind {
    /// Weighted area.
    A,
    /// Weighted volume on the frozen initial normal and measure.
    V,
    /// F-functional with moving center and scale.
    F,
    /// `A + λV`.
    J,
    /// Gaussian density term of F alone.
    T,
}

impl std::str::FromStr for FunctionalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Self::A),
            "V" => Ok(Self::V),
            "F" => Ok(Self::F),
            "J" => Ok(Self::J),
            "T" => Ok(Self::T),
            other => Err(Error::InvalidParameter(format!("unknown functional `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationSpec {
    pub speed: ScalarField,
    /// `y`
    pub center_velocity: Vec<f64>,
    /// `h`
    pub scale_velocity: f64,
    pub volume_preserving: bool,
}

impl VariationSpec {
    /// Pure normal variation with fixed center and scale.
    pub fn normal(speed: ScalarField, ambient_dim: usize) -> Self {
        Self { speed, center_velocity: vec![0.0; ambient_dim], scale_velocity: 0.0, volume_preserving: false }
    }

    pub fn with_center_velocity(mut self, y: Vec<f64>) -> Self {
        self.center_velocity = y;
        self
    }

    pub fn with_scale_velocity(mut self, h: f64) -> Self {
        self.scale_velocity = h;
        self
    }

    pub fn volume_preserving(mut self) -> Self {
        self.volume_preserving = true;
        self
    }

    fn validate(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        let dim = grid.surface().ambient_dim();
        if self.center_velocity.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "center velocity has {} coordinates, expected {dim}",
                self.center_velocity.len()
            )));
        }
        let f = self.speed.evaluate_on(grid)?;
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("speed is not finite at node {i}")));
        }
        if self.volume_preserving {
            check_volume_preserving(grid, &f)?;
        }
        Ok(f)
    }
}

fn check_volume_preserving(grid: &QuadratureGrid, f: &[f64]) -> Result<()> {
    let mean = integrate(grid, f, true)?;
    let spread: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let l1 = integrate(grid, &spread, true)?;
    if mean.abs() > VOLUME_PRESERVING_TOL * l1 {
        return Err(Error::NotVolumePreserving { mean });
    }
    Ok(())
}

/// `f − (∫ f w)/(∫ w)`, keeping derivative data of `f`.
pub fn project_volume_preserving(grid: &QuadratureGrid, f: &ScalarField) -> Result<ScalarField> {
    let values = f.evaluate_on(grid)?;
    let mean = integrate(grid, &values, true)? / weighted_area(grid);
    Ok(match f {
        ScalarField::Sampled(v) => ScalarField::Sampled(v.iter().map(|x| x - mean).collect()),
        _ => ScalarField::Sum(vec![(1.0, f.clone()), (-mean, ScalarField::Constant(1.0))]),
    })
}

/// `A′(0) = ∫ (−⟨X−X0, N⟩/t0 − H) f w`
pub fn analytic_first_variation_a(grid: &QuadratureGrid, spec: &VariationSpec) -> Result<f64> {
    let f = spec.validate(grid)?;
    let t0 = grid.scale();
    let integrand: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&f)
        .map(|(node, f)| (-dot(&grid.offset(node), &node.sample.normal) / t0 - node.sample.mean_curvature) * f)
        .collect();
    integrate(grid, &integrand, true)
}

/// `V′(0) = ∫ f w`
pub fn analytic_first_variation_v(grid: &QuadratureGrid, spec: &VariationSpec) -> Result<f64> {
    let f = spec.validate(grid)?;
    integrate(grid, &f, true)
}

/// `J′(0) = A′(0) + λ V′(0)`
pub fn analytic_first_variation_j(grid: &QuadratureGrid, spec: &VariationSpec, lambda: f64) -> Result<f64> {
    Ok(analytic_first_variation_a(grid, spec)? + lambda * analytic_first_variation_v(grid, spec)?)
}

/// First variation of F with center velocity `y` and scale velocity `h`:
///
/// `(4πt0)^{−n/2} [ ∫(λ − H − ⟨X−X0,N⟩/t0) f w + ∫(⟨X−X0,y⟩/t0 − λ⟨N,y⟩) w
///   + ∫(|X−X0|²/t0 − n − λ⟨X−X0,N⟩) h/(2t0) w ]`
pub fn analytic_first_variation_f(grid: &QuadratureGrid, spec: &VariationSpec, lambda: f64) -> Result<f64> {
    let f = spec.validate(grid)?;
    let t0 = grid.scale();
    let n = grid.surface().dim() as f64;
    let y = &spec.center_velocity;
    let h = spec.scale_velocity;
    let integrand: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&f)
        .map(|(node, f)| {
            let x = grid.offset(node);
            let nrm = &node.sample.normal;
            let xn = dot(&x, nrm);
            (lambda - node.sample.mean_curvature - xn / t0) * f
                + (dot(&x, y) / t0 - lambda * dot(nrm, y))
                + (norm_sq(&x) / t0 - n - lambda * xn) * h / (2.0 * t0)
        })
        .collect();
    Ok(gaussian_normalization(grid.surface().dim(), t0) * integrate(grid, &integrand, true)?)
}

/// First variation of the Gaussian density term alone.
pub fn analytic_first_variation_t(grid: &QuadratureGrid, spec: &VariationSpec) -> Result<f64> {
    let f = spec.validate(grid)?;
    let t0 = grid.scale();
    let n = grid.surface().dim() as f64;
    let y = &spec.center_velocity;
    let h = spec.scale_velocity;
    let integrand: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&f)
        .map(|(node, f)| {
            let x = grid.offset(node);
            (-dot(&x, &node.sample.normal) / t0 - node.sample.mean_curvature) * f
                + dot(&x, y) / t0
                + (norm_sq(&x) / t0 - n) * h / (2.0 * t0)
        })
        .collect();
    Ok(gaussian_normalization(grid.surface().dim(), t0) * integrate(grid, &integrand, true)?)
}

pub fn analytic_first_variation(
    kind: FunctionalKind,
    grid: &QuadratureGrid,
    spec: &VariationSpec,
    lambda: f64,
) -> Result<f64> {
    match kind {
        FunctionalKind::A => analytic_first_variation_a(grid, spec),
        FunctionalKind::V => analytic_first_variation_v(grid, spec),
        FunctionalKind::J => analytic_first_variation_j(grid, spec, lambda),
        FunctionalKind::F => analytic_first_variation_f(grid, spec, lambda),
        FunctionalKind::T => analytic_first_variation_t(grid, spec),
    }
}

fn require_standard_gaussian(grid: &QuadratureGrid) -> Result<()> {
    if grid.is_standard_gaussian() {
        Ok(())
    } else {
        Err(Error::Unsupported("second variations are stated for X0 = 0, t0 = 1".into()))
    }
}

/// `−∫ f L f w` with `L = ℒ + S + 1 − λ²`, per node.
fn stability_integrand(grid: &QuadratureGrid, speed: &ScalarField, lambda: f64) -> Result<Vec<f64>> {
    let jets = speed.jets_on(grid)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(&jets)
        .map(|(node, j)| {
            let lf = j.drift_laplacian(&node.sample.position, 1.0)
                + (node.sample.squared_norm + 1.0 - lambda * lambda) * j.value;
            -j.value * lf
        })
        .collect())
}

/// Second variation of F on an origin-centered round sphere with `X0 = 0`,
/// `t0 = 1`, returned as `F″(0)` (the five integrals times `(4π)^{−n/2}`).
pub fn analytic_second_variation_f(grid: &QuadratureGrid, spec: &VariationSpec, lambda: f64) -> Result<f64> {
    match grid.surface() {
        Hypersurface::Sphere(s) if s.is_centered() => {}
        _ => return Err(Error::Unsupported("second variation of F is implemented on origin-centered spheres".into())),
    }
    require_standard_gaussian(grid)?;
    let f = spec.validate(grid)?;
    let n = grid.surface().dim() as f64;
    let y = &spec.center_velocity;
    let h = spec.scale_velocity;
    let quadratic = stability_integrand(grid, &spec.speed, lambda)?;
    let integrand: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&f)
        .zip(&quadratic)
        .map(|((node, f), q)| {
            let x = &node.sample.position;
            let nrm = &node.sample.normal;
            let big_h = node.sample.mean_curvature;
            let x2 = norm_sq(x);
            let xy = dot(x, y);
            let ny = dot(nrm, y);
            q + (-norm_sq(y) + xy * xy)
                + (2.0 * ny + (n + 1.0 - x2) * lambda * h - 2.0 * h * big_h - 2.0 * lambda * xy) * f
                + (lambda * ny - (n + 2.0) * xy + xy * x2) * h
                + ((n * n + 2.0 * n) / 4.0 - (n + 2.0) / 2.0 * x2 + x2 * x2 / 4.0
                    + 0.75 * lambda * (lambda - big_h))
                    * h
                    * h
        })
        .collect();
    Ok(gaussian_normalization(grid.surface().dim(), 1.0) * integrate(grid, &integrand, true)?)
}

/// Second variation of the Gaussian density term for a weighted
/// volume-preserving speed with fixed center and scale:
/// `T″(0) = (4π)^{−n/2} ∫ −f(ℒf + (S + 1 − λ²)f) w`.
pub fn analytic_second_variation_t(grid: &QuadratureGrid, speed: &ScalarField) -> Result<f64> {
    require_standard_gaussian(grid)?;
    let f = speed.evaluate_on(grid)?;
    check_volume_preserving(grid, &f)?;
    let lambda = grid.surface().lambda_exact().unwrap_or_else(|| mean_lambda(grid));
    let q = stability_integrand(grid, speed, lambda)?;
    Ok(gaussian_normalization(grid.surface().dim(), 1.0) * integrate(grid, &q, true)?)
}
