use crate::error::Result;
use crate::geometry::GeometrySample;
use crate::quadrature::QuadratureGrid;
use crate::vector::{dot, norm_sq};

use super::{lambda_of, IdentityReport, INTEGRAL_TOL};

type Term<'a> = Box<dyn Fn(&GeometrySample) -> f64 + 'a>;

/// Each side is a sum of terms. The residual is `|lhs − rhs|` divided by
/// the sum of `∫|term| w` over all terms, so pointwise cancellation inside
/// an integrand does not inflate it.
fn compare(grid: &QuadratureGrid, id: &str, lhs: &[Term], rhs: &[Term]) -> IdentityReport {
    let side = |terms: &[Term]| grid.integrate_fn(true, |nd| terms.iter().map(|t| t(&nd.sample)).sum::<f64>());
    let l = side(lhs);
    let r = side(rhs);
    let scale: f64 = lhs.iter().chain(rhs).map(|t| grid.integrate_fn(true, |nd| t(&nd.sample).abs())).sum();
    let abs = (l - r).abs();
    let rel = if scale > 0.0 { abs / scale } else { 0.0 };
    let mut rep = IdentityReport::new(id, grid.surface().describe(), abs, rel, rel, INTEGRAL_TOL);
    rep.lhs = Some(l);
    rep.rhs = Some(r);
    rep
}

/// Fixed generic direction `a` used by the identities with a vector argument.
pub(crate) fn probe_direction(dim: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..dim).map(|i| if i % 2 == 0 { 1.0 + i as f64 } else { -(1.0 + i as f64) }).collect();
    let norm = norm_sq(&a).sqrt();
    a.iter().map(|v| v / norm).collect()
}

/// Weighted integral identities, both sides integrated separately. The
/// identities with `|X|⁴`-size integrands use a grid 50% finer.
pub fn check_integral(grid: &QuadratureGrid) -> Result<Vec<IdentityReport>> {
    let n = grid.surface().dim() as f64;
    let lam = lambda_of(grid);
    let a = probe_direction(grid.surface().ambient_dim());
    let a2 = norm_sq(&a);
    let fine = grid.refined(grid.resolution() * 3 / 2)?;
    let ax = |s: &GeometrySample| dot(&s.position, &a);
    let an = |s: &GeometrySample| dot(&s.normal, &a);
    let gap = move |s: &GeometrySample| lam - s.mean_curvature;
    let x2 = |s: &GeometrySample| norm_sq(&s.position);
    let zero: Vec<Term> = vec![Box::new(|_| 0.0)];

    let out = vec![
        compare(grid, "weighted_height_balance", &[Box::new(ax), Box::new(|s| -lam * an(s))], &zero),
        compare(
            grid,
            "weighted_radial_balance",
            &[Box::new(move |_| n), Box::new(|s| -x2(s)), Box::new(|s| lam * dot(&s.position, &s.normal))],
            &zero,
        ),
        compare(
            &fine,
            "weighted_height_second_moment",
            &[Box::new(|s| ax(s) * x2(s))],
            &[
                Box::new(|s| 2.0 * n * lam * an(s)),
                Box::new(|s| 2.0 * lam * ax(s) * gap(s)),
                Box::new(|s| -lam * an(s) * x2(s)),
            ],
        ),
        compare(
            grid,
            "weighted_height_square",
            &[Box::new(|s| ax(s) * ax(s))],
            &[Box::new(|s| a2 - an(s) * an(s)), Box::new(|s| lam * an(s) * ax(s))],
        ),
        compare(
            &fine,
            "weighted_radial_variance",
            &[Box::new(|s| {
                let v = x2(s) - n - 0.5 * lam * gap(s);
                v * v
            })],
            &[
                Box::new(|s| (0.25 * lam * lam - 1.0) * gap(s) * gap(s)),
                Box::new(move |_| 2.0 * n + lam * lam),
                Box::new(|s| -s.mean_curvature * s.mean_curvature),
            ],
        ),
    ];
    Ok(out)
}
