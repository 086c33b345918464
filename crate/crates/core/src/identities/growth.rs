use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, unit_sphere_area, Hypersurface};
use crate::quadrature::QuadratureGrid;
use crate::vector::norm_sq;

use super::lambda_of;

/// `n + λ²/2 − 2β − inf H²/2` with `β = ¼ inf (λ − H)²`, infima over the nodes
/// (exact on the homogeneous analytic families).
pub fn growth_exponent_bound(grid: &QuadratureGrid) -> f64 {
    let n = grid.surface().dim() as f64;
    let lam = lambda_of(grid);
    let mut inf_gap2 = f64::INFINITY;
    let mut inf_h2 = f64::INFINITY;
    for node in grid.nodes() {
        let h = node.sample.mean_curvature;
        inf_gap2 = inf_gap2.min((lam - h) * (lam - h));
        inf_h2 = inf_h2.min(h * h);
    }
    let beta = 0.25 * inf_gap2;
    n + 0.5 * lam * lam - 2.0 * beta - 0.5 * inf_h2
}

/// Distance from the origin to the farthest point of the compact factor.
fn circumradius(surface: &Hypersurface) -> f64 {
    match surface {
        Hypersurface::Sphere(s) => s.radius + norm_sq(&s.center).sqrt(),
        Hypersurface::Cylinder(c) => c.radius,
        Hypersurface::Polyline(c) => c.vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
        Hypersurface::Product(p) => p.curve.vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
    }
}

/// Unweighted `Area(B_R(0) ∩ M)`: closed form on spheres and cylinders,
/// vertex-wise clipping of the flat ball on curves and curve products.
pub fn area_in_ball(surface: &Hypersurface, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
    }
    let flat_ball = |m: usize, rho2: f64| if rho2 > 0.0 { unit_ball_volume(m) * rho2.sqrt().powi(m as i32) } else { 0.0 };
    Ok(match surface {
        Hypersurface::Sphere(s) => {
            if !s.is_centered() {
                return Err(Error::Unsupported("ball areas of off-center spheres".into()));
            }
            if radius >= s.radius {
                unit_sphere_area(s.n) * s.radius.powi(s.n as i32)
            } else {
                0.0
            }
        }
        Hypersurface::Cylinder(c) => {
            let round = if c.k == 0 { 1.0 } else { unit_sphere_area(c.k) * c.radius.powi(c.k as i32) };
            let m = c.n - c.k;
            if m == 0 {
                if radius >= c.radius {
                    round
                } else {
                    0.0
                }
            } else {
                round * flat_ball(m, radius * radius - c.radius * c.radius)
            }
        }
        Hypersurface::Polyline(c) => (0..c.len())
            .filter(|&i| norm_sq(&c.vertices[i]) <= radius * radius)
            .map(|i| c.dual_length(i))
            .sum(),
        Hypersurface::Product(p) => (0..p.curve.len())
            .map(|i| p.curve.dual_length(i) * flat_ball(p.flat_dim, radius * radius - norm_sq(&p.curve.vertices[i])))
            .sum(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least-squares slope of `log Area(B_R ∩ M)` against `log R`.
pub fn area_growth_slope(surface: &Hypersurface, radii: &[f64]) -> Result<GrowthFit> {
    if radii.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be increasing".into()));
    }
    let rc = circumradius(surface);
    if radii[0] <= rc {
        return Err(Error::InvalidParameter(format!("radius {} does not exceed the compact factor ({rc})", radii[0])));
    }
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| Ok((r.ln(), area_in_ball(surface, r)?.ln())))
        .collect::<Result<_>>()?;
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(GrowthFit { slope, intercept, residual })
}
