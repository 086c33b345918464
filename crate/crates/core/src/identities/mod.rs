//! Pointwise and integral identities of λ-hypersurfaces, Simons-type
//! inequalities, classification flags and area growth.
//!
//! All checks use the standard Gaussian (`X0 = 0`, `t0 = 1`).

mod growth;
mod integral;
mod pointwise;

pub use growth::{area_growth_slope, area_in_ball, growth_exponent_bound, GrowthFit};
pub use integral::check_integral;
pub use pointwise::{check_pointwise, drift_at, DriftData, Probe};

use serde::Serialize;

use crate::error::Result;
use crate::functionals::mean_lambda;
use crate::geometry::lambda_residual;
use crate::quadrature::QuadratureGrid;

pub const POINTWISE_TOL_ANALYTIC: f64 = 1e-8;
pub const POINTWISE_TOL_DISCRETE: f64 = 1e-4;
pub const INTEGRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub surface: String,
    pub absolute: f64,
    pub relative: f64,
    /// The number compared against `tolerance`.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    /// Smallest slack of an inequality (negative means violated).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl IdentityReport {
    fn new(id: &str, surface: String, absolute: f64, relative: f64, residual: f64, tolerance: f64) -> Self {
        Self {
            id: id.to_string(),
            surface,
            absolute,
            relative,
            residual,
            tolerance,
            pass: residual <= tolerance,
            lhs: None,
            rhs: None,
            min_slack: None,
            skipped: None,
        }
    }

    fn skipped(id: &str, surface: String, reason: String) -> Self {
        let mut r = Self::new(id, surface, 0.0, 0.0, 0.0, 0.0);
        r.skipped = Some(reason);
        r
    }
}

/// λ used by the checks: closed form when known, otherwise the weighted mean.
pub fn lambda_of(grid: &QuadratureGrid) -> f64 {
    grid.surface().lambda_exact().unwrap_or_else(|| mean_lambda(grid))
}

/// Sup of `|⟨X,N⟩ + H − λ|` over the nodes.
pub fn lambda_gate(grid: &QuadratureGrid) -> f64 {
    lambda_residual(grid, &vec![0.0; grid.surface().ambient_dim()], 1.0, lambda_of(grid)).1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationDiagnostics {
    pub surface: String,
    pub lambda: f64,
    pub lambda_residual: f64,
    /// `min (H − λ)`
    pub min_gap: f64,
    /// `min λ(f₃(H − λ) − S)`
    pub min_hypothesis: f64,
    pub gap_nonnegative: bool,
    pub hypothesis_holds: bool,
    pub mean_curvature_min: f64,
    pub mean_curvature_max: f64,
    pub mean_curvature_constant: bool,
    /// `(k, r)` of the matching `S^k(r) × R^{n−k}` when `H` is constant.
    pub matched: Option<(usize, f64)>,
}

/// Hypothesis flags of the compact classification and the constant-`H`
/// match against generalized cylinders.
pub fn classification_diagnostics(grid: &QuadratureGrid) -> Result<ClassificationDiagnostics> {
    let lam = lambda_of(grid);
    let tol = if grid.surface().is_analytic() { POINTWISE_TOL_ANALYTIC } else { POINTWISE_TOL_DISCRETE };
    let mut min_gap = f64::INFINITY;
    let mut min_hyp = f64::INFINITY;
    let mut hmin = f64::INFINITY;
    let mut hmax = f64::NEG_INFINITY;
    for node in grid.nodes() {
        let s = &node.sample;
        let gap = s.mean_curvature - lam;
        min_gap = min_gap.min(gap);
        min_hyp = min_hyp.min(lam * (s.cubic_trace * gap - s.squared_norm));
        hmin = hmin.min(s.mean_curvature);
        hmax = hmax.max(s.mean_curvature);
    }
    let constant = hmax - hmin <= tol * hmax.abs().max(1.0);
    let matched = if constant { match_cylinder(grid, tol) } else { None };
    Ok(ClassificationDiagnostics {
        surface: grid.surface().describe(),
        lambda: lam,
        lambda_residual: lambda_gate(grid),
        min_gap,
        min_hypothesis: min_hyp,
        gap_nonnegative: min_gap >= -tol,
        hypothesis_holds: min_gap >= -tol && min_hyp >= -tol,
        mean_curvature_min: hmin,
        mean_curvature_max: hmax,
        mean_curvature_constant: constant,
        matched,
    })
}

fn match_cylinder(grid: &QuadratureGrid, tol: f64) -> Option<(usize, f64)> {
    let s = &grid.nodes().first()?.sample;
    let nonzero: Vec<f64> = s.principal_curvatures.iter().copied().filter(|k| k.abs() > tol).collect();
    let k = nonzero.len();
    if k == 0 {
        return Some((0, -crate::vector::dot(&s.position, &s.normal)));
    }
    let kappa = nonzero[0];
    if nonzero.iter().any(|v| (v - kappa).abs() > tol * kappa.abs().max(1.0)) {
        return None;
    }
    Some((k, 1.0 / kappa.abs()))
}
