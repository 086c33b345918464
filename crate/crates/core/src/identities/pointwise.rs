use crate::error::{Error, Result};
use crate::fields::{curvature_derivatives, ScalarField};
use crate::geometry::{GeometrySample, Hypersurface, Param};
use crate::quadrature::{QuadratureGrid, QuadratureNode};
use crate::vector::{dot, norm_sq, unit};

use super::{lambda_gate, lambda_of, IdentityReport, POINTWISE_TOL_ANALYTIC, POINTWISE_TOL_DISCRETE};

/// Step for finite differences across flat coordinates. The probes are
/// polynomials of degree ≤ 2 in those coordinates, so the stencil is exact.
const FLAT_STEP: f64 = 1e-2;

/// Scalar quantities whose drift Laplacian enters the identities.
#[derive(Debug, Clone, PartialEq)]
pub enum Probe {
    Height(Vec<f64>),
    Normal(Vec<f64>),
    SquaredNorm,
    MeanCurvature,
    SecondFormNorm,
    RootSecondFormNorm,
    /// `log(H − λ)`
    LogGap(f64),
}

impl Probe {
    pub fn value(&self, s: &GeometrySample) -> f64 {
        match self {
            Probe::Height(a) => dot(&s.position, a),
            Probe::Normal(a) => dot(&s.normal, a),
            Probe::SquaredNorm => norm_sq(&s.position),
            Probe::MeanCurvature => s.mean_curvature,
            Probe::SecondFormNorm => s.squared_norm,
            Probe::RootSecondFormNorm => s.squared_norm.sqrt(),
            Probe::LogGap(lam) => (s.mean_curvature - lam).ln(),
        }
    }

    fn field(&self) -> Option<ScalarField> {
        match self {
            Probe::Height(a) => Some(ScalarField::Height(a.clone())),
            Probe::Normal(a) => Some(ScalarField::NormalComponent(a.clone())),
            Probe::SquaredNorm => Some(ScalarField::SquaredNorm),
            _ => None,
        }
    }
}

/// Value, `ℒφ = Δφ − ⟨X, ∇φ⟩` and `|∇φ|²` at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftData {
    pub value: f64,
    pub drift: f64,
    pub grad_sq: f64,
}

/// On spheres and cylinders the curvature probes are constant and the
/// others use closed-form jets. On curves and curve products derivatives
/// along the curve come from the three-point arclength stencil and those
/// across flat coordinates from central differences.
pub fn drift_at(surface: &Hypersurface, node: &QuadratureNode, probe: &Probe) -> Result<DriftData> {
    let x = &node.sample.position;
    match surface {
        Hypersurface::Sphere(_) | Hypersurface::Cylinder(_) => match probe.field() {
            Some(f) => {
                let j = f.jet(surface, node)?;
                Ok(DriftData { value: j.value, drift: j.drift_laplacian(x, 1.0), grad_sq: norm_sq(&j.gradient) })
            }
            None => Ok(DriftData { value: probe.value(&node.sample), drift: 0.0, grad_sq: 0.0 }),
        },
        Hypersurface::Polyline(c) => {
            let Param::Vertex(i) = node.param else {
                return Err(Error::InvalidParameter("polyline node without a vertex".into()));
            };
            let (p, q) = c.neighbors(i)?;
            let vals = [probe.value(&c.sample(p)?), probe.value(&node.sample), probe.value(&c.sample(q)?)];
            let (d1, d2) = c.stencil(i, vals)?;
            let t = &node.sample.principal_directions[0];
            Ok(DriftData { value: vals[1], drift: d2 - dot(x, t) * d1, grad_sq: d1 * d1 })
        }
        Hypersurface::Product(pr) => {
            let Param::ProductVertex { vertex: i, flat } = &node.param else {
                return Err(Error::InvalidParameter("product node without a vertex".into()));
            };
            let c = &pr.curve;
            let (p, q) = c.neighbors(*i)?;
            let v0 = probe.value(&node.sample);
            let vals = [probe.value(&pr.sample(p, flat)?), v0, probe.value(&pr.sample(q, flat)?)];
            let (d1, d2) = c.stencil(*i, vals)?;
            let t = &node.sample.principal_directions[0];
            let mut drift = d2 - dot(x, t) * d1;
            let mut grad_sq = d1 * d1;
            for j in 0..flat.len() {
                let mut w = flat.clone();
                w[j] += FLAT_STEP;
                let fp = probe.value(&pr.sample(*i, &w)?);
                w[j] -= 2.0 * FLAT_STEP;
                let fm = probe.value(&pr.sample(*i, &w)?);
                let g = (fp - fm) / (2.0 * FLAT_STEP);
                drift += (fp - 2.0 * v0 + fm) / (FLAT_STEP * FLAT_STEP) - flat[j] * g;
                grad_sq += g * g;
            }
            Ok(DriftData { value: v0, drift, grad_sq })
        }
    }
}

/// `(Σ h_ijk², Σ h_iik²)`: zero on the parallel analytic families, `κ_s²`
/// on curves and curve products.
fn third_order(surface: &Hypersurface, node: &QuadratureNode) -> Result<(f64, f64)> {
    let curve_vertex = match (surface, &node.param) {
        (Hypersurface::Polyline(c), Param::Vertex(i)) => Some((c, *i)),
        (Hypersurface::Product(p), Param::ProductVertex { vertex, .. }) => Some((&p.curve, *vertex)),
        _ => None,
    };
    Ok(match curve_vertex {
        Some((c, i)) => {
            let ks = curvature_derivatives(c, i)?.0;
            (ks * ks, ks * ks)
        }
        None => (0.0, 0.0),
    })
}

struct Sup {
    abs: f64,
    scale: f64,
}

impl Sup {
    fn new() -> Self {
        Self { abs: 0.0, scale: 0.0 }
    }
    fn push(&mut self, lhs: f64, rhs: f64) {
        self.abs = self.abs.max((lhs - rhs).abs());
        self.scale = self.scale.max(lhs.abs()).max(rhs.abs());
    }
    fn report(&self, id: &str, surface: String, tol: f64) -> IdentityReport {
        let rel = if self.scale > 0.0 { self.abs / self.scale } else { 0.0 };
        IdentityReport::new(id, surface, self.abs, rel, self.abs, tol)
    }
}

/// Sup-norm residuals of the drift identities for `⟨X,a⟩`, `⟨N,a⟩`, `|X|²`,
/// `H`, `S`, `√S`, `log(H − λ)` and the slacks of the Simons-type
/// inequalities, over every node of the grid and every coordinate axis `a`.
pub fn check_pointwise(grid: &QuadratureGrid) -> Result<Vec<IdentityReport>> {
    let surface = grid.surface();
    let name = surface.describe();
    let tol = if surface.is_analytic() { POINTWISE_TOL_ANALYTIC } else { POINTWISE_TOL_DISCRETE };
    let n = surface.dim() as f64;
    let d = surface.ambient_dim();
    let lam = lambda_of(grid);
    let gate = lambda_gate(grid);
    let mut out = Vec::new();

    // Simons-type inequalities hold on every hypersurface.
    let mut slack_a = f64::INFINITY;
    let mut slack_b = f64::INFINITY;
    let mut slack_c = f64::INFINITY;
    let mut third_max = 0.0_f64;
    for node in grid.nodes() {
        let (ijk, iik) = third_order(surface, node)?;
        let root = drift_at(surface, node, &Probe::RootSecondFormNorm)?.grad_sq;
        let grad_h = drift_at(surface, node, &Probe::MeanCurvature)?.grad_sq;
        slack_a = slack_a.min(iik - root);
        slack_b = slack_b.min(ijk - iik);
        slack_c = slack_c.min(ijk + 2.0 * n / (n + 1.0) * grad_h - (n + 3.0) / (n + 1.0) * root);
        third_max = third_max.max(ijk).max(root).max(grad_h);
    }
    for (id, slack) in [
        ("simons_gradient_root_norm", slack_a),
        ("simons_diagonal_third_order", slack_b),
        ("simons_mean_curvature_gradient", slack_c),
    ] {
        let violation = (-slack).max(0.0);
        let mut r = IdentityReport::new(id, name.clone(), violation, violation / third_max.max(1.0), violation, tol);
        r.min_slack = Some(slack);
        out.push(r);
    }
    if third_max == 0.0 {
        let mut r = IdentityReport::new("simons_equality", name.clone(), 0.0, 0.0, 0.0, tol);
        r.min_slack = Some(0.0);
        out.push(r);
    }

    let ids = [
        "drift_height",
        "drift_normal",
        "drift_squared_norm",
        "drift_mean_curvature",
        "drift_second_form_norm",
        "drift_root_second_form_norm",
        "drift_log_gap",
    ];
    if gate > tol {
        for id in ids {
            out.push(IdentityReport::skipped(id, name.clone(), format!("not a λ-hypersurface: residual {gate:e}")));
        }
        return Ok(out);
    }

    let mut sups: Vec<Sup> = ids.iter().map(|_| Sup::new()).collect();
    let positive_s = grid.nodes().iter().all(|nd| nd.sample.squared_norm > tol);
    let positive_gap = grid.nodes().iter().all(|nd| nd.sample.mean_curvature - lam > tol);
    for node in grid.nodes() {
        let s = &node.sample;
        let xn = dot(&s.position, &s.normal);
        for axis in 0..d {
            let a = unit(d, axis);
            let h = drift_at(surface, node, &Probe::Height(a.clone()))?;
            sups[0].push(h.drift, lam * dot(&s.normal, &a) - h.value);
            let nv = drift_at(surface, node, &Probe::Normal(a))?;
            sups[1].push(nv.drift, -s.squared_norm * nv.value);
        }
        let x2 = drift_at(surface, node, &Probe::SquaredNorm)?;
        sups[2].push(0.5 * x2.drift, n - x2.value + lam * xn);
        let hh = drift_at(surface, node, &Probe::MeanCurvature)?;
        sups[3].push(hh.drift, s.mean_curvature + s.squared_norm * (lam - s.mean_curvature));
        let (ijk, _) = third_order(surface, node)?;
        let ss = drift_at(surface, node, &Probe::SecondFormNorm)?;
        sups[4].push(0.5 * ss.drift, ijk + (1.0 - s.squared_norm) * s.squared_norm + lam * s.cubic_trace);
        if positive_s {
            let rs = drift_at(surface, node, &Probe::RootSecondFormNorm)?;
            let root = rs.value;
            let rhs = (ijk - rs.grad_sq) / root + root * (1.0 - s.squared_norm) + lam * s.cubic_trace / root;
            sups[5].push(rs.drift, rhs);
        }
        if positive_gap {
            let lg = drift_at(surface, node, &Probe::LogGap(lam))?;
            let gap = s.mean_curvature - lam;
            sups[6].push(lg.drift, 1.0 - s.squared_norm + lam / gap - lg.grad_sq);
        }
    }
    for (k, (id, sup)) in ids.iter().zip(&sups).enumerate() {
        if k == 5 && !positive_s {
            out.push(IdentityReport::skipped(id, name.clone(), "S vanishes somewhere".into()));
        } else if k == 6 && !positive_gap {
            out.push(IdentityReport::skipped(id, name.clone(), "H − λ is not positive everywhere".into()));
        } else {
            out.push(sup.report(id, name.clone(), tol));
        }
    }
    Ok(out)
}
