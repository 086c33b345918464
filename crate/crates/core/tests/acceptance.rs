//! One PASS/FAIL line per acceptance criterion, with pinned tolerances and
//! wall-clock budgets. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use lamhyp::curves::{circle_radius, discover_closed, product_with_line, shoot_closed, ShootOptions, ShootTarget};
use lamhyp::fields::{QuadraticHarmonic, ScalarField};
use lamhyp::flow::{perturbed_circle, run, FlowConfig};
use lamhyp::geometry::lambda_residual;
use lamhyp::identities::{
    area_growth_slope, check_integral, check_pointwise, classification_diagnostics, growth_exponent_bound,
    INTEGRAL_TOL, POINTWISE_TOL_ANALYTIC,
};
use lamhyp::stability::{sweep, Thresholds};
use lamhyp::variation::{
    analytic_first_variation, analytic_second_variation_f, numeric_variation, numeric_variation_detailed,
    FunctionalKind, VariationSpec,
};
use lamhyp::{build_grid, Hypersurface, PolylineCurve, QuadratureGrid};

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome { pass, summary: summary.into() }
}

fn timed(id: usize, budget: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = body();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let pass = o.pass && in_time;
    println!(
        "{} criterion {id}: {} [{:.2} s of {:.0} s]",
        if pass { "PASS" } else { "FAIL" },
        o.summary,
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    pass
}

fn grid(s: &Hypersurface, res: usize) -> QuadratureGrid {
    build_grid(s, res).unwrap()
}

fn sup_residual(g: &QuadratureGrid, lambda: f64) -> f64 {
    lambda_residual(g, &vec![0.0; g.surface().ambient_dim()], 1.0, lambda).1
}

fn lambda_residuals() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=3usize {
        for k in 0..=n {
            let mut radii = vec![0.5, 1.0, 2.0];
            if k >= 1 {
                radii.push((k as f64).sqrt());
            }
            for r in radii {
                let s = if k == n { Hypersurface::sphere(n, r) } else { Hypersurface::cylinder(n, k, r) }.unwrap();
                let lam = if k == n { n as f64 / r - r } else { k as f64 / r - r };
                worst = worst.max(sup_residual(&grid(&s, 12), lam));
                count += 1;
            }
        }
    }
    outcome(worst <= TOL, format!("sup λ-residual {worst:.2e} ≤ {TOL:e} over {count} surfaces"))
}

fn volume_conservation() -> Outcome {
    const TOL: f64 = 1e-4;
    const FLOOR: f64 = 1e-12;
    let c = perturbed_circle(1.0, 0.05, [1.0, 0.0], 256).unwrap();
    let cfg = FlowConfig::default();
    let d1 = run(c.clone(), 0.1, 1e-4, &cfg, &mut []).unwrap().max_relative_volume_defect();
    let d2 = run(c, 0.1, 5e-5, &cfg, &mut []).unwrap().max_relative_volume_defect();
    let ratio = d1 / d2;
    let converges = ratio >= 2.0 || (d1 <= FLOOR && d2 <= FLOOR);
    outcome(
        d1 <= TOL && converges,
        format!("defect {d1:.2e} ≤ {TOL:e}; halved-dt defect {d2:.2e}, ratio {ratio:.2} (≥ 2 or both ≤ {FLOOR:e})"),
    )
}

/// Errors at ε and ε/2 against the analytic value.
fn first_variation_errors(kind: FunctionalKind, g: &QuadratureGrid, spec: &VariationSpec, lam: f64, eps: f64) -> (f64, f64, f64) {
    let exact = analytic_first_variation(kind, g, spec, lam).unwrap();
    let d = numeric_variation_detailed(kind, g, spec, lam, eps, 1).unwrap();
    (exact, (d.value - exact).abs(), (d.half_step - exact).abs())
}

fn first_variations() -> Outcome {
    // pinned: error ≤ C ε² relative to max(|exact|, 1); ratio in [3.5, 4.5]
    // unless both errors sit at the roundoff floor
    const C: f64 = 10.0;
    const EPS: f64 = 1e-2;
    const FLOOR: f64 = 1e-11;
    const CRITICAL_TOL: f64 = 1e-6;
    let mut ok = true;
    let mut ratios = vec![];
    let fixtures = [
        (Hypersurface::sphere(2, 1.3).unwrap(), 24, 0.4),
        (Hypersurface::polyline(PolylineCurve::ellipse(2.0, 1.0, 4096).unwrap()), 16, 0.2),
    ];
    for (s, res, lam) in &fixtures {
        let g = grid(s, *res);
        let d = s.ambient_dim();
        let mut a = vec![0.0; d];
        a[0] = 0.3;
        a[1] = 1.0;
        let speed = ScalarField::Sum(vec![(1.0, ScalarField::Constant(0.5)), (1.0, ScalarField::Height(a))]);
        let mut y = vec![0.0; d];
        y[0] = 0.2;
        y[1] = -0.1;
        for kind in [FunctionalKind::A, FunctionalKind::V, FunctionalKind::F] {
            let spec = if kind == FunctionalKind::F {
                VariationSpec::normal(speed.clone(), d).with_center_velocity(y.clone()).with_scale_velocity(0.3)
            } else {
                VariationSpec::normal(speed.clone(), d)
            };
            let (exact, e1, e2) = first_variation_errors(kind, &g, &spec, *lam, EPS);
            let scale = exact.abs().max(1.0);
            let floor = e1 <= FLOOR * scale && e2 <= FLOOR * scale;
            let ratio = e1 / e2;
            let good = e1 <= C * EPS * EPS * scale && (floor || (3.5..=4.5).contains(&ratio));
            ratios.push(if floor { "floor".to_string() } else { format!("{ratio:.2}") });
            ok &= good;
        }
    }
    let mut worst: f64 = 0.0;
    let battery: Vec<(Hypersurface, ScalarField, Vec<f64>, f64)> = vec![
        (Hypersurface::sphere(2, 1.0).unwrap(), ScalarField::Constant(1.0), vec![0.0; 3], 0.0),
        (Hypersurface::sphere(2, 1.0).unwrap(), ScalarField::NormalComponent(vec![0.0, 0.0, 1.0]), vec![0.0, 0.0, 1.0], 0.0),
        (Hypersurface::sphere(2, 2f64.sqrt()).unwrap(), ScalarField::SquaredNorm, vec![0.1, 0.2, 0.3], 0.5),
        (Hypersurface::sphere(2, 1.7).unwrap(), ScalarField::Harmonic(QuadraticHarmonic::product(3, 0, 1).unwrap()), vec![0.0; 3], -0.4),
        (Hypersurface::sphere(1, 1.0).unwrap(), ScalarField::Height(vec![1.0, 2.0]), vec![0.5, -0.5], 0.2),
        (Hypersurface::sphere(3, 0.9).unwrap(), ScalarField::Constant(-0.7), vec![0.0, 0.3, 0.0, 0.1], 1.0),
        (Hypersurface::cylinder(2, 1, 1.0).unwrap(), ScalarField::Constant(1.0), vec![0.0; 3], 0.3),
        (Hypersurface::cylinder(2, 1, 0.8).unwrap(), ScalarField::NormalComponent(vec![1.0, 0.0, 0.0]), vec![0.2, 0.0, 0.4], 0.0),
        (Hypersurface::cylinder(3, 2, 1.2).unwrap(), ScalarField::Height(vec![0.0, 1.0, 0.5, 0.0]), vec![0.1, 0.1, 0.1, 0.1], -0.2),
        (Hypersurface::cylinder(2, 0, 0.6).unwrap(), ScalarField::Height(vec![1.0, 0.0, 0.0]), vec![0.3, 0.0, 0.0], 0.6),
    ];
    for (s, f, y, h) in &battery {
        let g = grid(s, 20);
        let lam = s.lambda_exact().unwrap();
        let spec = VariationSpec::normal(f.clone(), s.ambient_dim()).with_center_velocity(y.clone()).with_scale_velocity(*h);
        let d = numeric_variation_detailed(FunctionalKind::F, &g, &spec, lam, 1e-3, 1).unwrap();
        let exact = analytic_first_variation(FunctionalKind::F, &g, &spec, lam).unwrap();
        worst = worst.max(d.richardson.abs()).max(exact.abs());
    }
    ok &= worst <= CRITICAL_TOL;
    outcome(
        ok,
        format!(
            "A′,V′,F′ ratios on sphere/ellipse {ratios:?} (error ≤ {C}ε², ε = {EPS}); F′ on {} λ-hypersurface variations max {worst:.2e} ≤ {CRITICAL_TOL:e}",
            battery.len()
        ),
    )
}

fn second_variations() -> Outcome {
    const TOL: f64 = 1e-4;
    let mut worst: f64 = 0.0;
    let speeds = [
        ScalarField::Constant(1.0),
        ScalarField::NormalComponent(vec![0.0, 0.0, 1.0]),
        ScalarField::Harmonic(QuadraticHarmonic::difference_of_squares(3, 0, 1).unwrap()),
    ];
    for r in [2f64.sqrt(), 1.0] {
        let g = grid(&Hypersurface::sphere(2, r).unwrap(), 32);
        let lam = 2.0 / r - r;
        for f in &speeds {
            for (y, h) in [(vec![0.0; 3], 0.0), (vec![0.3, -0.2, 0.5], 0.25)] {
                let spec = VariationSpec::normal(f.clone(), 3).with_center_velocity(y).with_scale_velocity(h);
                let exact = analytic_second_variation_f(&g, &spec, lam).unwrap();
                let num = numeric_variation(FunctionalKind::F, &g, &spec, lam, 1e-3, 2).unwrap();
                worst = worst.max((num - exact).abs() / exact.abs().max(1e-3));
            }
        }
    }
    outcome(worst <= TOL, format!("max relative error {worst:.2e} ≤ {TOL:e} on S²(√2), S²(1)"))
}

/// Verdict flips of `stable` over `radii`, as bracketing pairs.
fn flips(radii: &[f64], stable: &[bool]) -> Vec<(f64, f64)> {
    (1..radii.len()).filter(|&i| stable[i] != stable[i - 1]).map(|i| (radii[i - 1], radii[i])).collect()
}

fn brackets(pairs: &[(f64, f64)], thresholds: &[f64]) -> bool {
    pairs.len() == thresholds.len()
        && pairs.iter().zip(thresholds).all(|(&(a, b), &t)| a - 1e-12 <= t && t <= b + 1e-12)
}

fn stability_thresholds() -> Outcome {
    let radii: Vec<f64> = (1..=300).map(|i| i as f64 / 100.0).collect();
    let dims = [1usize, 2, 3];
    let reports = sweep(&dims, &radii).unwrap();
    let mut ok = true;
    let mut notes = vec![];
    for (j, &n) in dims.iter().enumerate() {
        let rows = &reports[j * radii.len()..(j + 1) * radii.len()];
        let t = Thresholds::new(n);
        let f: Vec<bool> = rows.iter().map(|r| r.f_stable.is_stable()).collect();
        let w: Vec<bool> = rows.iter().map(|r| r.weak_stable.is_stable()).collect();
        let ff = flips(&radii, &f);
        let wf = flips(&radii, &w);
        let good = brackets(&ff, &[t.f_lower, t.f_upper]) && brackets(&wf, &[t.weak_lower, t.weak_upper]);
        ok &= good;
        notes.push(format!("n={n} F {ff:?} weak {wf:?}"));
    }
    let mut unstable = 0;
    let mut bad = 0;
    for r in &reports {
        for (verdict, wit) in [(r.f_stable, &r.f_witness), (r.weak_stable, &r.weak_witness)] {
            if !verdict.is_stable() {
                unstable += 1;
                if !wit.as_ref().is_some_and(|w| w.value < 0.0) {
                    bad += 1;
                }
            }
        }
    }
    ok &= bad == 0;
    outcome(ok, format!("{}; {unstable} unstable verdicts, {bad} without a negative witness", notes.join("; ")))
}

fn integral_identities() -> Outcome {
    let mut surfaces = vec![];
    for n in [1usize, 2] {
        for r in [1.0, (n as f64).sqrt(), 2.0] {
            surfaces.push(Hypersurface::sphere(n, r).unwrap());
        }
    }
    surfaces.push(Hypersurface::cylinder(2, 1, 1.0).unwrap());
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for s in &surfaces {
        for rep in check_integral(&grid(s, 24)).unwrap() {
            worst = worst.max(rep.relative);
            count += 1;
        }
    }
    outcome(worst <= INTEGRAL_TOL, format!("{count} identity checks, max relative {worst:.2e} ≤ {INTEGRAL_TOL:e}"))
}

fn pointwise_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut equality = true;
    let mut any_skipped = false;
    for n in 1..=3usize {
        for r in [0.7, 1.0, 1.9] {
            let mut surfaces = vec![Hypersurface::sphere(n, r).unwrap()];
            for k in 1..n {
                surfaces.push(Hypersurface::cylinder(n, k, r).unwrap());
            }
            for s in &surfaces {
                let reps = check_pointwise(&grid(s, 10)).unwrap();
                for rep in &reps {
                    any_skipped |= rep.skipped.is_some();
                    worst = worst.max(rep.residual);
                    count += 1;
                }
                if matches!(s, Hypersurface::Sphere(_)) {
                    let eq = reps.iter().find(|r| r.id == "simons_equality");
                    equality &= eq.is_some_and(|e| e.pass && e.min_slack == Some(0.0));
                }
            }
        }
    }
    outcome(
        worst <= POINTWISE_TOL_ANALYTIC && equality && !any_skipped,
        format!("{count} checks, sup residual {worst:.2e} ≤ {POINTWISE_TOL_ANALYTIC:e}; sphere equality case {equality}"),
    )
}

fn growth_slopes() -> Outcome {
    const TOL: f64 = 0.05;
    let mut ok = true;
    let mut notes = vec![];
    for (n, k) in [(2usize, 1usize), (3, 2)] {
        let s = Hypersurface::cylinder(n, k, 1.0).unwrap();
        let exponent = growth_exponent_bound(&grid(&s, 16));
        let fit = area_growth_slope(&s, &[4.0, 8.0, 16.0, 32.0]).unwrap();
        ok &= (exponent - (n - k) as f64).abs() < 1e-12;
        ok &= (fit.slope - exponent).abs() <= TOL && fit.slope >= 1.0 - TOL;
        notes.push(format!("S^{k}(1)×R slope {:.4} vs exponent {exponent}", fit.slope));
    }
    outcome(ok, notes.join("; "))
}

fn lambda_curves() -> Outcome {
    const RADIUS_TOL: f64 = 1e-8;
    const GAP_TOL: f64 = 1e-6;
    const PRODUCT_TOL: f64 = 1e-5;
    let opts = ShootOptions::default();
    let mut ok = true;
    let mut worst_radius: f64 = 0.0;
    for lam in [-0.5, 0.0, 0.5, 1.0] {
        let r = circle_radius(lam);
        let c = shoot_closed(lam, (0.9 * r, 1.1 * r), ShootTarget::Circle, &opts).unwrap();
        worst_radius = worst_radius.max((c.rho0 - r).abs()).max((c.rho0 * c.rho0 + lam * c.rho0 - 1.0).abs());
    }
    ok &= worst_radius <= RADIUS_TOL;
    let found = discover_closed(-0.5, (2.0, 5.0), 31, 3, &opts).unwrap();
    let Some(c) = found.first() else {
        return outcome(false, format!("circle radius error {worst_radius:.2e}; no non-circular curve found for λ = -0.5"));
    };
    let gap = c.position_gap.max(c.heading_gap);
    ok &= gap <= GAP_TOL && c.embedded && !c.is_circle();
    let prod = product_with_line(&c.curve, 1).unwrap();
    let g = grid(&prod, 16);
    let res = sup_residual(&g, -0.5);
    let d = classification_diagnostics(&g).unwrap();
    ok &= res <= PRODUCT_TOL && d.min_gap > 0.0 && !d.mean_curvature_constant;
    outcome(
        ok,
        format!(
            "circle radius error {worst_radius:.2e}; {:?} curve ρ₀ = {:.6}, gap {gap:.2e}, embedded {}; Γ×R residual {res:.2e}, min(H−λ) {:.3}, H ∈ [{:.3}, {:.3}]",
            c.target, c.rho0, c.embedded, d.min_gap, d.mean_curvature_min, d.mean_curvature_max
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let results = [
        timed(1, s(1), lambda_residuals),
        timed(2, s(30), volume_conservation),
        timed(3, s(10), first_variations),
        timed(4, s(10), second_variations),
        timed(5, s(5), stability_thresholds),
        timed(6, s(10), integral_identities),
        timed(7, s(5), pointwise_identities),
        timed(8, s(5), growth_slopes),
        timed(9, s(60), lambda_curves),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
