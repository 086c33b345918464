use std::path::Path;

use serde_json::json;

use crate::curves::{circle_radius, discover_closed, product_with_line, shoot_closed, ShootOptions, ShootTarget};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::flow::{perturbed_circle, run, FlowConfig};
use crate::geometry::{lambda_residual, Hypersurface};
use crate::identities::{
    area_growth_slope, check_integral, check_pointwise, classification_diagnostics, growth_exponent_bound, lambda_of,
    IdentityReport, POINTWISE_TOL_ANALYTIC, POINTWISE_TOL_DISCRETE,
};
use crate::quadrature::{build_grid, QuadratureGrid};
use crate::stability::{
    f_stability_certificate, sphere_lambda, sphere_spectrum, sweep, sweep_csv, HarmonicDecomposition, Thresholds,
};
use crate::variation::{analytic_first_variation, numeric_variation, FunctionalKind, VariationSpec};
use crate::vector::unit;

use super::config::SpeedKind;
use super::{Artifact, Check, Command, Outcome, Report, Scenario};

struct Parts {
    checks: Vec<Check>,
    data: serde_json::Value,
    artifacts: Vec<Artifact>,
}

/// Runs `command` (or the scenario's own) and assembles the report.
/// Relative curve paths resolve against `base`.
pub fn run_scenario(scenario: &Scenario, command: Option<Command>, base: &Path) -> Result<Outcome> {
    scenario.validate()?;
    let cmd = match (command, scenario.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!("config is for `{}` but `{}` was requested", b.name(), a.name())))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(Error::Config("no command given".into())),
    };
    let parts = match cmd {
        Command::Verify => verify(scenario, base)?,
        Command::Flow => flow(scenario)?,
        Command::Spectrum => spectrum(scenario)?,
        Command::Stability => stability(scenario)?,
        Command::Curve => curve(scenario)?,
        Command::Growth => growth(scenario, base)?,
        Command::Variation => variation(scenario, base)?,
    };
    let mut resolved = scenario.clone();
    resolved.command = Some(cmd);
    Ok(Outcome {
        report: Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: cmd.name().to_string(),
            config_hash: resolved.hash(),
            checks: parts.checks,
            data: parts.data,
        },
        artifacts: parts.artifacts,
    })
}

fn grid_for(s: &Scenario, base: &Path) -> Result<QuadratureGrid> {
    build_grid(&s.surface()?.build(base)?, s.resolution)
}

fn identity_check(r: &IdentityReport, tol: Option<f64>) -> Check {
    let tolerance = tol.unwrap_or(r.tolerance);
    let name = r.id.clone();
    match &r.skipped {
        Some(why) => Check { name, pass: true, value: 0.0, tolerance, detail: Some(format!("skipped: {why}")) },
        None => Check::at_most(name, r.residual, tolerance),
    }
}

fn verify(s: &Scenario, base: &Path) -> Result<Parts> {
    let grid = grid_for(s, base)?;
    let surface = grid.surface();
    let pt_tol = if surface.is_analytic() { POINTWISE_TOL_ANALYTIC } else { POINTWISE_TOL_DISCRETE };
    let lam = lambda_of(&grid);
    let (_, sup) = lambda_residual(&grid, &vec![0.0; surface.ambient_dim()], 1.0, lam);
    let mut checks = vec![Check::at_most("lambda_residual", sup, s.tolerance.unwrap_or(pt_tol))];
    let pointwise = check_pointwise(&grid)?;
    let integral = if sup <= pt_tol { check_integral(&grid)? } else { vec![] };
    checks.extend(pointwise.iter().map(|r| identity_check(r, None)));
    checks.extend(integral.iter().map(|r| identity_check(r, s.tolerance)));
    let diag = classification_diagnostics(&grid)?;
    Ok(Parts {
        checks,
        data: json!({
            "surface": surface.describe(),
            "lambda": lam,
            "pointwise": pointwise,
            "integral": integral,
            "classification": diag,
        }),
        artifacts: vec![],
    })
}

/// Largest ratio of volume defects accepted as "at the roundoff floor".
const VOLUME_FLOOR: f64 = 1e-12;

fn flow(s: &Scenario) -> Result<Parts> {
    let f = &s.flow;
    let tol = s.tolerance.unwrap_or(1e-4);
    let curve = perturbed_circle(f.radius, f.amplitude, [1.0, 0.0], f.vertices)?;
    let cfg = FlowConfig::default();
    let coarse = run(curve.clone(), f.duration, f.dt, &cfg, &mut [])?;
    let fine = run(curve, f.duration, 0.5 * f.dt, &cfg, &mut [])?;
    let d1 = coarse.max_relative_volume_defect();
    let d2 = fine.max_relative_volume_defect();
    let ratio = if d2 > 0.0 { d1 / d2 } else { f64::INFINITY };
    let floor = d1 <= VOLUME_FLOOR && d2 <= VOLUME_FLOOR;
    let refine = Check { name: "volume_defect_refinement".into(), pass: ratio >= 2.0 || floor, value: ratio, tolerance: 2.0, detail: None }
        .with_detail(format!("defects {d1:e} (dt) and {d2:e} (dt/2); floor {VOLUME_FLOOR:e}"));
    Ok(Parts {
        checks: vec![Check::at_most("volume_defect", d1, tol), refine],
        data: json!({
            "dt": f.dt,
            "duration": f.duration,
            "defect": d1,
            "defect_half_step": d2,
            "final_alpha": coarse.samples.last().map(|x| x.alpha),
            "steps": coarse.samples.len() - 1,
        }),
        artifacts: vec![
            Artifact { name: "flow_history.jsonl".into(), contents: coarse.to_json_lines() },
            Artifact { name: "flow_final.csv".into(), contents: coarse.final_state.curve.to_csv() },
        ],
    })
}

fn spectrum(s: &Scenario) -> Result<Parts> {
    let p = &s.spectrum;
    let entries = sphere_spectrum(p.n, p.radius, p.k_max)?;
    let n = p.n as f64;
    let lam = sphere_lambda(p.n, p.radius);
    let sq = n / (p.radius * p.radius);
    let stability: Vec<f64> = entries.iter().map(|e| e.eigenvalue - sq - 1.0 + lam * lam).collect();
    let mu1 = entries[1].eigenvalue;
    Ok(Parts {
        checks: vec![Check::at_most("first_eigenvalue_is_second_form_norm", (mu1 - sq).abs(), 1e-12 * sq.max(1.0))],
        data: json!({
            "n": p.n,
            "radius": p.radius,
            "lambda": lam,
            "laplacian": entries,
            "stability_operator": stability,
            "thresholds": Thresholds::new(p.n),
        }),
        artifacts: vec![],
    })
}

fn stability(s: &Scenario) -> Result<Parts> {
    let w = &s.stability;
    let radii = w.radii();
    let reports = sweep(&w.dims, &radii)?;
    let mut bad_witness = 0usize;
    let mut bad_certificate = 0usize;
    let mut weak_not_f = 0usize;
    for r in &reports {
        for wit in [&r.f_witness, &r.weak_witness].into_iter().flatten() {
            if !(wit.value < 0.0) {
                bad_witness += 1;
            }
        }
        if r.weak_stable.is_stable() && !r.f_stable.is_stable() {
            weak_not_f += 1;
        }
        if r.f_stable.is_stable() {
            let d = HarmonicDecomposition { higher: vec![(2, 1.0), (3, 0.5)], constant: 0.7, linear: unit(r.n + 1, 0) };
            match f_stability_certificate(r.n, r.r, &d)? {
                Some((_, _, v)) if v >= 0.0 => {}
                _ => bad_certificate += 1,
            }
        }
    }
    let unstable = reports.iter().filter(|r| !r.f_stable.is_stable()).count();
    Ok(Parts {
        checks: vec![
            Check::at_most("unstable_rows_with_nonnegative_witness", bad_witness as f64, 0.0),
            Check::at_most("stable_rows_without_certificate", bad_certificate as f64, 0.0),
            Check::at_most("weakly_stable_but_f_unstable", weak_not_f as f64, 0.0),
        ],
        data: json!({
            "rows": reports.len(),
            "f_unstable_rows": unstable,
            "thresholds": w.dims.iter().map(|&n| (n, Thresholds::new(n))).collect::<Vec<_>>(),
        }),
        artifacts: vec![Artifact { name: "stability.csv".into(), contents: sweep_csv(&reports) }],
    })
}

fn curve(s: &Scenario) -> Result<Parts> {
    let c = &s.curve;
    let opts = ShootOptions { spacing: c.spacing, ..Default::default() };
    let r = circle_radius(c.lambda);
    let circle = shoot_closed(c.lambda, (0.9 * r, 1.1 * r), ShootTarget::Circle, &opts)?;
    let mut checks = vec![Check::at_most("circle_radius", (circle.rho0 - r).abs(), 1e-8)];
    let found = discover_closed(c.lambda, (c.rho_min, c.rho_max), c.samples, c.max_lobes, &opts)?;
    if c.lambda < 0.0 {
        checks.push(Check::at_least("non_circular_closed_embedded", found.len() as f64, 1.0));
    }
    let mut artifacts = vec![];
    let mut rows = vec![];
    for (i, f) in found.iter().enumerate() {
        checks.push(Check::at_most(format!("closure_gap_{i}"), f.position_gap.max(f.heading_gap), crate::curves::CLOSURE_TOL));
        let mut row = json!({
            "rho0": f.rho0,
            "target": format!("{:?}", f.target),
            "length": f.length,
            "vertices": f.curve.len(),
            "position_gap": f.position_gap,
            "heading_gap": f.heading_gap,
            "embedded": f.embedded,
            "radial_spread": f.radial_spread,
        });
        if c.flat_dim > 0 {
            let prod = product_with_line(&f.curve, c.flat_dim)?;
            let g = build_grid(&prod, s.resolution)?;
            let (_, sup) = lambda_residual(&g, &vec![0.0; prod.ambient_dim()], 1.0, c.lambda);
            let d = classification_diagnostics(&g)?;
            checks.push(Check::at_most(format!("product_lambda_residual_{i}"), sup, s.tolerance.unwrap_or(1e-5)));
            row["product"] = json!({ "lambda_residual": sup, "classification": d });
        }
        rows.push(row);
        artifacts.push(Artifact { name: format!("curve_{i}.csv"), contents: f.curve.to_csv() });
    }
    Ok(Parts {
        checks,
        data: json!({ "lambda": c.lambda, "circle_radius": circle.rho0, "curves": rows }),
        artifacts,
    })
}

fn growth(s: &Scenario, base: &Path) -> Result<Parts> {
    let grid = grid_for(s, base)?;
    let surface = grid.surface();
    let tol = s.tolerance.unwrap_or(0.05);
    let exponent = growth_exponent_bound(&grid);
    let fit = area_growth_slope(surface, &s.growth.radii)?;
    let mut checks = vec![Check::at_most("slope_within_bound", fit.slope - exponent, tol)];
    if !surface.is_compact() {
        checks.push(Check::at_least("at_least_linear_growth", fit.slope, 1.0 - tol));
    }
    if matches!(surface, Hypersurface::Cylinder(_) | Hypersurface::Sphere(_)) {
        checks.push(Check::at_most("cylinder_equality", (fit.slope - exponent).abs(), tol));
    }
    Ok(Parts {
        checks,
        data: json!({ "surface": surface.describe(), "exponent": exponent, "fit": fit, "radii": s.growth.radii }),
        artifacts: vec![],
    })
}

fn variation(s: &Scenario, base: &Path) -> Result<Parts> {
    let grid = grid_for(s, base)?;
    let v = &s.variation;
    let kind: FunctionalKind = v.functional.parse()?;
    let d = grid.surface().ambient_dim();
    if v.axis >= d {
        return Err(Error::Config(format!("`variation.axis` must be below {d}")));
    }
    let a = unit(d, v.axis);
    let speed = match v.speed {
        SpeedKind::Constant => ScalarField::Constant(1.0),
        SpeedKind::Height => ScalarField::Height(a),
        SpeedKind::NormalComponent => ScalarField::NormalComponent(a),
        SpeedKind::SquaredNorm => ScalarField::SquaredNorm,
    };
    let y = if v.center_velocity.is_empty() { vec![0.0; d] } else { v.center_velocity.clone() };
    let spec = VariationSpec::normal(speed, d).with_center_velocity(y).with_scale_velocity(v.scale_velocity);
    let lam = lambda_of(&grid);
    let analytic = analytic_first_variation(kind, &grid, &spec, lam)?;
    let numeric = numeric_variation(kind, &grid, &spec, lam, v.epsilon, 1)?;
    let numeric_half = numeric_variation(kind, &grid, &spec, lam, 0.5 * v.epsilon, 1)?;
    let e1 = (numeric - analytic).abs();
    let e2 = (numeric_half - analytic).abs();
    let tol = s.tolerance.unwrap_or(1e-4) * analytic.abs().max(1.0);
    Ok(Parts {
        checks: vec![Check::at_most("first_variation_agreement", e2, tol)],
        data: json!({
            "functional": v.functional,
            "lambda": lam,
            "analytic": analytic,
            "numeric": numeric,
            "numeric_half_step": numeric_half,
            "error_ratio": if e2 > 0.0 { e1 / e2 } else { f64::INFINITY },
        }),
        artifacts: vec![],
    })
}
