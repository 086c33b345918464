//! Planar λ-curves `κ + ⟨X, N⟩ = λ` by shooting, and their products with
//! flat factors.
//!
//! Trajectories start at `(ρ₀, 0)` heading in `+y` (tangent perpendicular
//! to the axis). Points where `⟨X, T⟩ = 0` are reflection axes, so a curve
//! closes into `q` lobes exactly when the polar angle between consecutive
//! axis points is `π/q`.

mod ode;

pub use ode::{Integrator, State, Stop, Trajectory};

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{lambda_residual, CurveProduct, Hypersurface, PolylineCurve};
use crate::quadrature::build_grid;

/// Largest λ-residual accepted by `product_with_line`.
pub const PRODUCT_RESIDUAL_GATE: f64 = 1e-4;
/// Closure gap accepted for a shot curve, in position and in heading.
pub const CLOSURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveShootingProblem {
    pub lambda: f64,
    pub rho0: f64,
    pub tolerance: f64,
    pub max_arclength: f64,
    /// Arclength between output vertices.
    pub spacing: f64,
}

impl CurveShootingProblem {
    pub fn new(lambda: f64, rho0: f64) -> Self {
        Self { lambda, rho0, tolerance: 1e-11, max_arclength: 200.0, spacing: 2e-3 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0) || !(self.tolerance > 0.0) || !(self.max_arclength > 0.0) || !(self.spacing > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid shooting problem {self:?}")));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("λ must be finite".into()));
        }
        Ok(())
    }

    fn integrator(&self) -> Integrator {
        Integrator { lambda: self.lambda, tolerance: self.tolerance, max_arclength: self.max_arclength }
    }

    fn start(&self) -> State {
        [self.rho0, 0.0, FRAC_PI_2, 0.0]
    }
}

/// Radius of the circle solving `r² + λr − 1 = 0`.
pub fn circle_radius(lambda: f64) -> f64 {
    0.5 * (-lambda + (lambda * lambda + 4.0).sqrt())
}

fn to_polyline(samples: &[(f64, State)], closed: bool, lambda: f64) -> Result<PolylineCurve> {
    let mut pts: Vec<[f64; 2]> = samples.iter().map(|(_, y)| [y[0], y[1]]).collect();
    if closed {
        pts.pop();
    }
    Ok(PolylineCurve::new(pts, closed)?.with_lambda(lambda))
}

/// Trajectory until the polar angle has turned by `2π`, as an open polyline.
pub fn integrate_curve(problem: &CurveShootingProblem) -> Result<PolylineCurve> {
    problem.validate()?;
    let turn = |y: &State| y[3].abs() - 2.0 * PI;
    let t = problem.integrator().run(problem.start(), Stop::Crossing(&turn), Some(problem.spacing))?;
    let mut samples = t.samples;
    let last = samples.last().map(|v| v.0).unwrap_or(0.0);
    if t.end_s - last > 1e-6 * problem.spacing {
        samples.push((t.end_s, t.end));
    }
    to_polyline(&samples, false, problem.lambda)
}

/// Arclength and polar angle from the start to the next point with `⟨X, T⟩ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPeriod {
    pub length: f64,
    pub polar_angle: f64,
    pub radius: f64,
}

pub fn half_period(problem: &CurveShootingProblem) -> Result<HalfPeriod> {
    problem.validate()?;
    let radial = |y: &State| y[0] * y[2].cos() + y[1] * y[2].sin();
    let t = problem.integrator().run(problem.start(), Stop::Crossing(&radial), None)?;
    Ok(HalfPeriod { length: t.end_s, polar_angle: t.end[3], radius: t.end[0].hypot(t.end[1]) })
}

/// `|X| − ρ₀` once the heading has turned by `π`: zero on the circle.
pub fn circle_mismatch(problem: &CurveShootingProblem) -> Result<f64> {
    problem.validate()?;
    let heading = |y: &State| y[2] - 1.5 * PI;
    let t = problem.integrator().run(problem.start(), Stop::Crossing(&heading), None)?;
    Ok(t.end[0].hypot(t.end[1]) - problem.rho0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ShootTarget {
    Circle,
    /// `q`-fold symmetric curve: half-period polar angle `π/q`.
    Lobes(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootOptions {
    pub tolerance: f64,
    pub spacing: f64,
    pub max_arclength: f64,
    /// Bisection stops when the bracket is narrower than this.
    pub bracket_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { tolerance: 1e-11, spacing: 2e-3, max_arclength: 200.0, bracket_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    pub curve: PolylineCurve,
    pub lambda: f64,
    pub rho0: f64,
    pub target: ShootTarget,
    pub length: f64,
    pub position_gap: f64,
    pub heading_gap: f64,
    pub embedded: bool,
    /// `max |X| − min |X|` over the vertices.
    pub radial_spread: f64,
}

impl ClosedCurve {
    pub fn is_circle(&self) -> bool {
        self.radial_spread < 1e-6
    }

    pub fn closes(&self) -> bool {
        self.position_gap <= CLOSURE_TOL && self.heading_gap <= CLOSURE_TOL
    }
}

fn problem_for(lambda: f64, rho0: f64, opts: &ShootOptions) -> CurveShootingProblem {
    CurveShootingProblem {
        lambda,
        rho0,
        tolerance: opts.tolerance,
        max_arclength: opts.max_arclength,
        spacing: opts.spacing,
    }
}

fn mismatch(lambda: f64, rho0: f64, target: ShootTarget, opts: &ShootOptions) -> Result<f64> {
    let p = problem_for(lambda, rho0, opts);
    match target {
        ShootTarget::Circle => circle_mismatch(&p),
        ShootTarget::Lobes(q) => Ok(half_period(&p)?.polar_angle - PI / q as f64),
    }
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// Bisects the target mismatch over `[lo, hi]`, then integrates one full
/// traverse and measures its closure.
pub fn shoot_closed(lambda: f64, bracket: (f64, f64), target: ShootTarget, opts: &ShootOptions) -> Result<ClosedCurve> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad bracket {bracket:?}")));
    }
    if let ShootTarget::Lobes(q) = target {
        if q < 2 {
            return Err(Error::InvalidParameter("need at least 2 lobes".into()));
        }
    }
    let not_found = |why: String| Error::NotFound(format!("λ = {lambda}, bracket [{lo}, {hi}]: {why}"));
    let mut flo = mismatch(lambda, lo, target, opts).map_err(|e| not_found(e.to_string()))?;
    let fhi = mismatch(lambda, hi, target, opts).map_err(|e| not_found(e.to_string()))?;
    if flo * fhi > 0.0 {
        return Err(not_found("no sign change".into()));
    }
    while hi - lo > opts.bracket_tol * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = mismatch(lambda, mid, target, opts)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm * flo > 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let rho0 = 0.5 * (lo + hi);
    let total = match target {
        ShootTarget::Circle => 2.0 * PI * rho0,
        ShootTarget::Lobes(q) => 2.0 * q as f64 * half_period(&problem_for(lambda, rho0, opts))?.length,
    };
    let m = (total / opts.spacing).ceil().max(8.0);
    let ds = total / m;
    let p = CurveShootingProblem { spacing: ds, ..problem_for(lambda, rho0, opts) };
    let t = p.integrator().run(p.start(), Stop::Length(total), Some(ds))?;
    let y0 = p.start();
    let position_gap = (t.end[0] - y0[0]).hypot(t.end[1] - y0[1]);
    let heading_gap = wrap(t.end[2] - y0[2]).abs();
    let curve = to_polyline(&t.samples, true, lambda)?;
    let radii: Vec<f64> = curve.vertices.iter().map(|v| v[0].hypot(v[1])).collect();
    let radial_spread = radii.iter().cloned().fold(f64::MIN, f64::max) - radii.iter().cloned().fold(f64::MAX, f64::min);
    let embedded = curve.is_embedded();
    Ok(ClosedCurve { curve, lambda, rho0, target, length: total, position_gap, heading_gap, embedded, radial_spread })
}

/// Scans `ρ₀` over `samples` points of `range` for sign changes of the
/// `π/q` mismatch, `q = 2..=max_lobes`, and shoots each one. Returns the
/// closed embedded non-circular curves found, ordered by `(q, ρ₀)`.
pub fn discover_closed(
    lambda: f64,
    range: (f64, f64),
    samples: usize,
    max_lobes: usize,
    opts: &ShootOptions,
) -> Result<Vec<ClosedCurve>> {
    if samples < 2 || !(range.0 > 0.0 && range.1 > range.0) {
        return Err(Error::InvalidParameter("discovery needs ≥ 2 samples on a positive range".into()));
    }
    let rhos: Vec<f64> = (0..samples)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (samples - 1) as f64)
        .collect();
    let angles: Vec<Option<f64>> = rhos
        .par_iter()
        .map(|&r| half_period(&problem_for(lambda, r, opts)).ok().map(|h| h.polar_angle))
        .collect();
    let circle = circle_radius(lambda);
    let mut brackets = Vec::new();
    for q in 2..=max_lobes {
        let goal = PI / q as f64;
        for i in 0..samples - 1 {
            if let (Some(a), Some(b)) = (angles[i], angles[i + 1]) {
                let near_circle = (rhos[i] - circle) * (rhos[i + 1] - circle) <= 0.0;
                if (a - goal) * (b - goal) <= 0.0 && (a - b).abs() < 0.5 && !near_circle {
                    brackets.push((q, rhos[i], rhos[i + 1]));
                }
            }
        }
    }
    let found: Vec<Option<ClosedCurve>> = brackets
        .par_iter()
        .map(|&(q, a, b)| shoot_closed(lambda, (a, b), ShootTarget::Lobes(q), opts).ok())
        .collect();
    Ok(found
        .into_iter()
        .flatten()
        .filter(|c| c.closes() && c.embedded && !c.is_circle())
        .collect())
}

/// `Γ × R^m` for a closed curve carrying λ whose residual passes the gate.
pub fn product_with_line(curve: &PolylineCurve, m: usize) -> Result<Hypersurface> {
    if !curve.closed {
        return Err(Error::Unverified("the base curve is not closed".into()));
    }
    let Some(lam) = curve.lambda else {
        return Err(Error::Unverified("the base curve carries no λ".into()));
    };
    let grid = build_grid(&Hypersurface::polyline(curve.clone()), 16)?;
    let (_, sup) = lambda_residual(&grid, &[0.0, 0.0], 1.0, lam);
    if sup > PRODUCT_RESIDUAL_GATE {
        return Err(Error::Unverified(format!("λ-residual {sup:e} exceeds {PRODUCT_RESIDUAL_GATE:e}")));
    }
    Ok(Hypersurface::Product(CurveProduct::new(curve.clone(), m)?))
}

#[cfg(test)]
mod tests;
