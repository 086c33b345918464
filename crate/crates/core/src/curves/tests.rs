use super::*;
use crate::identities::classification_diagnostics;

#[test]
fn circle_start_traces_circle() {
    let r = 1.7;
    let mut p = CurveShootingProblem::new(1.0 / r - r, r);
    p.spacing = 0.01;
    let c = integrate_curve(&p).unwrap();
    assert!(!c.closed);
    assert!(c.vertices.iter().all(|v| (v[0].hypot(v[1]) - r).abs() < 1e-9));
    assert!((c.total_length() - 2.0 * PI * r).abs() < 1e-4);
    let unit = integrate_curve(&CurveShootingProblem::new(0.0, 1.0)).unwrap();
    assert!(unit.vertices.iter().all(|v| (v[0].hypot(v[1]) - 1.0).abs() < 1e-9));
}

#[test]
fn off_circle_start_has_varying_curvature() {
    let mut p = CurveShootingProblem::new(-0.5, 0.8);
    p.spacing = 0.01;
    let c = integrate_curve(&p).unwrap();
    let k: Vec<f64> = (1..c.len() - 1).map(|i| c.curvature(i).unwrap()).collect();
    let spread = k.iter().cloned().fold(f64::MIN, f64::max) - k.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 0.1, "{spread}");
}

#[test]
fn invalid_problem_rejected() {
    assert!(integrate_curve(&CurveShootingProblem::new(0.0, -1.0)).is_err());
    let mut p = CurveShootingProblem::new(0.0, 1.0);
    p.tolerance = 0.0;
    assert!(integrate_curve(&p).is_err());
}

#[test]
fn circle_recovery() {
    let opts = ShootOptions { spacing: 0.01, ..Default::default() };
    for lam in [-0.5, -0.1, 0.0, 0.3, 0.5, 1.0, 2.0] {
        let r = circle_radius(lam);
        assert!((r * r + lam * r - 1.0).abs() < 1e-14);
        let c = shoot_closed(lam, (0.9 * r, 1.1 * r), ShootTarget::Circle, &opts).unwrap();
        assert!((c.rho0 - r).abs() < 1e-8, "λ={lam}: {} vs {r}", c.rho0);
        assert!(c.closes() && c.embedded && c.is_circle());
    }
    assert!((circle_radius(1.0) - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
}

#[test]
fn no_sign_change_is_not_found() {
    let opts = ShootOptions { spacing: 0.01, ..Default::default() };
    let r = circle_radius(0.0);
    assert!(matches!(
        shoot_closed(0.0, (1.2 * r, 1.4 * r), ShootTarget::Circle, &opts),
        Err(Error::NotFound(_))
    ));
}

#[test]
fn two_lobe_curve_for_negative_lambda() {
    let c = shoot_closed(-0.5, (3.7, 4.0), ShootTarget::Lobes(2), &ShootOptions::default()).unwrap();
    assert!(c.closes(), "{} {}", c.position_gap, c.heading_gap);
    assert!(c.embedded);
    assert!(!c.is_circle());
    assert!((c.rho0 - 3.86835005).abs() < 1e-6, "{}", c.rho0);
    let prod = product_with_line(&c.curve, 1).unwrap();
    let g = build_grid(&prod, 16).unwrap();
    let (_, sup) = lambda_residual(&g, &[0.0; 3], 1.0, -0.5);
    assert!(sup <= 1e-5, "{sup}");
    let d = classification_diagnostics(&g).unwrap();
    assert!(d.min_gap > 0.0);
    assert!(!d.mean_curvature_constant);
}

#[test]
fn discovery_finds_the_two_lobe_curve() {
    let opts = ShootOptions { spacing: 4e-3, ..Default::default() };
    let found = discover_closed(-0.5, (2.0, 5.0), 31, 3, &opts).unwrap();
    assert!(found.iter().any(|c| c.target == ShootTarget::Lobes(2) && (c.rho0 - 3.86835).abs() < 1e-4));
}

#[test]
fn self_shrinker_discovery_finds_only_circles() {
    let opts = ShootOptions { spacing: 4e-3, ..Default::default() };
    assert!(discover_closed(0.0, (1.05, 3.0), 21, 4, &opts).unwrap().is_empty());
}

#[test]
fn product_examples() {
    let c = PolylineCurve::circle(1.0, 512).unwrap().with_lambda(0.0);
    let p = product_with_line(&c, 1).unwrap();
    assert_eq!(p.dim(), 2);
    assert_eq!(p.lambda_exact(), Some(0.0));
    let c2 = PolylineCurve::circle(2.0, 512).unwrap().with_lambda(-1.5);
    assert_eq!(product_with_line(&c2, 2).unwrap().ambient_dim(), 4);
    assert!(matches!(product_with_line(&PolylineCurve::circle(1.0, 64).unwrap(), 1), Err(Error::Unverified(_))));
    let e = PolylineCurve::ellipse(2.0, 1.0, 256).unwrap().with_lambda(0.0);
    assert!(matches!(product_with_line(&e, 1), Err(Error::Unverified(_))));
}

#[test]
fn product_residual_matches_curve() {
    let c = PolylineCurve::circle(1.3, 400).unwrap().with_lambda(1.0 / 1.3 - 1.3);
    let g1 = build_grid(&Hypersurface::polyline(c.clone()), 16).unwrap();
    let g2 = build_grid(&product_with_line(&c, 2).unwrap(), 16).unwrap();
    let r1 = lambda_residual(&g1, &[0.0; 2], 1.0, c.lambda.unwrap()).1;
    let r2 = lambda_residual(&g2, &[0.0; 4], 1.0, c.lambda.unwrap()).1;
    assert!((r1 - r2).abs() < 1e-15);
}

