//! Spectral stability of round spheres `S^n(r)` with `λ = n/r − r`.
//!
//! F-stability: `F″(0) ≥ 0` for every normal speed after choosing the center
//! and scale velocities `(y, h)` optimally. Weak stability: `T″(0) ≥ 0` for
//! every weighted volume-preserving speed with `(y, h) = 0`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::functionals::gaussian_normalization;
use crate::geometry::Hypersurface;
use crate::quadrature::{build_grid, QuadratureGrid};
use crate::variation::{analytic_second_variation_f, analytic_second_variation_t, VariationSpec};
use crate::vector::{dot, norm_sq, unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        self == Verdict::Stable
    }
}

/// Critical radii of the two stability notions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// `√n`: F-stable up to and including this radius.
    pub f_lower: f64,
    /// `√(n+1)`: F-stable strictly beyond this radius.
    pub f_upper: f64,
    /// `(−1 + √(1+4n))/2`
    pub weak_lower: f64,
    /// `(1 + √(1+4n))/2`
    pub weak_upper: f64,
}

impl Thresholds {
    pub fn new(n: usize) -> Self {
        let nf = n as f64;
        let d = (1.0 + 4.0 * nf).sqrt();
        Self { f_lower: nf.sqrt(), f_upper: (nf + 1.0).sqrt(), weak_lower: (d - 1.0) / 2.0, weak_upper: (d + 1.0) / 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub degree: usize,
    /// `μ_k = (k² + (n−1)k)/r²`
    pub eigenvalue: f64,
    /// Dimension of the degree-`k` spherical harmonics on `S^n`.
    pub multiplicity: u128,
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn harmonic_multiplicity(n: usize, k: usize) -> u128 {
    let (n, k) = (n as u64, k as u64);
    let top = binomial(n + k, k);
    if k >= 2 {
        top - binomial(n + k - 2, k - 2)
    } else {
        top
    }
}

fn check_sphere(n: usize, r: f64) -> Result<()> {
    if n == 0 || !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("need n ≥ 1 and r > 0, got n = {n}, r = {r}")));
    }
    Ok(())
}

/// Laplacian eigenvalues `μ_0, …, μ_{k_max}` on `S^n(r)`.
pub fn sphere_spectrum(n: usize, r: f64, k_max: usize) -> Result<Vec<SpectrumEntry>> {
    check_sphere(n, r)?;
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    Ok((0..=k_max)
        .map(|k| SpectrumEntry {
            degree: k,
            eigenvalue: (k * k + (n - 1) * k) as f64 / (r * r),
            multiplicity: harmonic_multiplicity(n, k),
        })
        .collect())
}

pub fn sphere_lambda(n: usize, r: f64) -> f64 {
    n as f64 / r - r
}

/// A variation `(f, y, h)` with its second-variation value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// The speed is `⟨z, N⟩`.
    pub speed_direction: Vec<f64>,
    pub center_velocity: Vec<f64>,
    pub scale_velocity: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

/// Quadrature resolution used for witnesses on `S^n`.
fn witness_resolution(n: usize) -> usize {
    match n {
        1 => 64,
        2 => 32,
        _ => 16,
    }
}

fn sphere_grid(n: usize, r: f64) -> Result<QuadratureGrid> {
    build_grid(&Hypersurface::sphere(n, r)?, witness_resolution(n))
}

/// Supremum over `(y, h)` of the quadratic `p ↦ c + gᵀp + ½pᵀHp`.
/// Returns `None` when unbounded.
fn quadratic_supremum(c: f64, g: &DVector<f64>, h: &DMatrix<f64>) -> Option<(f64, DVector<f64>)> {
    let eig = SymmetricEigen::new(h.clone());
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let gscale = g.amax().max(c.abs()).max(1e-300);
    let mut best = c;
    let mut arg = DVector::zeros(g.len());
    for (i, mu) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let gi = v.dot(g);
        if *mu > 1e-9 * scale {
            return None;
        }
        if mu.abs() <= 1e-9 * scale {
            if gi.abs() > 1e-9 * gscale {
                return None;
            }
            continue;
        }
        let t = -gi / mu;
        best += 0.5 * gi * t;
        arg += v * t;
    }
    Some((best, arg))
}

/// Maximizes `F″(0)` over `(y, h)` for a fixed speed using the quadrature
/// second-variation formula.
pub fn maximize_over_center_and_scale(grid: &QuadratureGrid, speed: &ScalarField, lambda: f64) -> Result<Option<Witness>> {
    let dim = grid.surface().ambient_dim();
    let p = dim + 1;
    let q = |v: &[f64]| {
        let spec = VariationSpec::normal(speed.clone(), dim)
            .with_center_velocity(v[..dim].to_vec())
            .with_scale_velocity(v[dim]);
        analytic_second_variation_f(grid, &spec, lambda)
    };
    let c = q(&vec![0.0; p])?;
    let mut plus = vec![0.0; p];
    let mut minus = vec![0.0; p];
    let mut g = DVector::zeros(p);
    let mut hess = DMatrix::zeros(p, p);
    for i in 0..p {
        let e = unit(p, i);
        plus[i] = q(&e)?;
        minus[i] = q(&e.iter().map(|x| -x).collect::<Vec<_>>())?;
        g[i] = 0.5 * (plus[i] - minus[i]);
        hess[(i, i)] = plus[i] + minus[i] - 2.0 * c;
    }
    for i in 0..p {
        for j in 0..i {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            e[j] = 1.0;
            let v = q(&e)? - plus[i] - plus[j] + c;
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let direction = match speed {
        ScalarField::NormalComponent(z) => z.clone(),
        _ => vec![0.0; dim],
    };
    Ok(quadratic_supremum(c, &g, &hess).map(|(value, arg)| Witness {
        speed_direction: direction,
        center_velocity: arg.as_slice()[..dim].to_vec(),
        scale_velocity: arg[dim],
        value,
    }))
}

/// Stable iff `r ≤ √n` or `r > √(n+1)`. Unstable verdicts carry the witness
/// `f = ⟨e₁, N⟩` with `F″` maximized over `(y, h)`.
pub fn f_stability_verdict(n: usize, r: f64) -> Result<StabilityVerdict> {
    check_sphere(n, r)?;
    let t = Thresholds::new(n);
    if r <= t.f_lower || r > t.f_upper {
        return Ok(StabilityVerdict { verdict: Verdict::Stable, witness: None });
    }
    let grid = sphere_grid(n, r)?;
    let speed = ScalarField::NormalComponent(unit(n + 1, 0));
    let witness = maximize_over_center_and_scale(&grid, &speed, sphere_lambda(n, r))?.unwrap_or(Witness {
        speed_direction: unit(n + 1, 0),
        center_velocity: vec![0.0; n + 1],
        scale_velocity: 0.0,
        value: f64::INFINITY,
    });
    Ok(StabilityVerdict { verdict: Verdict::Unstable, witness: Some(witness) })
}

/// Stable iff `|λ| ≥ 1`, i.e. `r ≤ (−1+√(1+4n))/2` or `r ≥ (1+√(1+4n))/2`.
/// Unstable verdicts carry `f = ⟨e₁, N⟩` with its `T″(0)`.
pub fn weak_stability_verdict(n: usize, r: f64) -> Result<StabilityVerdict> {
    check_sphere(n, r)?;
    let t = Thresholds::new(n);
    if r <= t.weak_lower || r >= t.weak_upper {
        return Ok(StabilityVerdict { verdict: Verdict::Stable, witness: None });
    }
    let grid = sphere_grid(n, r)?;
    let z = unit(n + 1, 0);
    let value = analytic_second_variation_t(&grid, &ScalarField::NormalComponent(z.clone()))?;
    Ok(StabilityVerdict {
        verdict: Verdict::Unstable,
        witness: Some(Witness { speed_direction: z, center_velocity: vec![0.0; n + 1], scale_velocity: 0.0, value }),
    })
}

/// Smallest `μ_k − S − 1 + λ²` over degrees `k ≥ 1`: the floor of the
/// Rayleigh quotient of `−L` on weighted mean-zero speeds.
pub fn weak_stability_operator_floor(n: usize, r: f64) -> Result<f64> {
    let s = n as f64 / (r * r);
    let lam = sphere_lambda(n, r);
    Ok(sphere_spectrum(n, r, 8)?
        .iter()
        .skip(1)
        .map(|e| e.eigenvalue - s - 1.0 + lam * lam)
        .fold(f64::INFINITY, f64::min))
}

/// Speed `f = Σ f_k + a + ⟨z, N⟩` split by harmonic degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarmonicDecomposition {
    /// `(degree ≥ 2, ∫ f_k² w dμ)`
    pub higher: Vec<(usize, f64)>,
    pub constant: f64,
    pub linear: Vec<f64>,
}

/// `|S^n(r)|·e^{−r²/2}`
fn weighted_sphere_area(n: usize, r: f64) -> f64 {
    crate::geometry::unit_sphere_area(n) * r.powi(n as i32) * (-0.5 * r * r).exp()
}

/// `F″(0)` on `S^n(r)` evaluated from the spectrum:
///
/// `Σ_k (μ_k − S − 1 + λ²)‖f_k‖² − (S+1−λ²)a²|S| + (λ²−1)‖⟨z,N⟩‖²
///  + 2(1+λr)∫⟨N,y⟩⟨N,z⟩ + ((n+1−r²)λ − 2n/r)ha|S|
///  + ¼(r⁴ − (2n+1)r² + n(n−1))h²|S| − |y|²|S| + r²∫⟨N,y⟩²`
///
/// with `|S|` the weighted area and `∫⟨N,u⟩⟨N,v⟩ = ⟨u,v⟩|S|/(n+1)`.
pub fn f_stability_form(n: usize, r: f64, decomposition: &HarmonicDecomposition, y: &[f64], h: f64) -> Result<f64> {
    check_sphere(n, r)?;
    let d = decomposition;
    if d.linear.len() != n + 1 || y.len() != n + 1 {
        return Err(Error::InvalidParameter(format!("vectors must have {} coordinates", n + 1)));
    }
    let nf = n as f64;
    let lam = sphere_lambda(n, r);
    let s = nf / (r * r);
    let area = weighted_sphere_area(n, r);
    let pair = |u: &[f64], v: &[f64]| dot(u, v) * area / (nf + 1.0);
    let mut total = 0.0;
    for (k, norm2) in &d.higher {
        if *k < 2 {
            return Err(Error::InvalidParameter("higher harmonics must have degree ≥ 2".into()));
        }
        let mu = (k * k + (n - 1) * k) as f64 / (r * r);
        total += (mu - s - 1.0 + lam * lam) * norm2;
    }
    let a = d.constant;
    let z = &d.linear;
    total += -(s + 1.0 - lam * lam) * a * a * area;
    total += (lam * lam - 1.0) * pair(z, z);
    total += 2.0 * (1.0 + lam * r) * pair(y, z);
    total += ((nf + 1.0 - r * r) * lam - 2.0 * nf / r) * h * a * area;
    total += 0.25 * (r.powi(4) - (2.0 * nf + 1.0) * r * r + nf * (nf - 1.0)) * h * h * area;
    total += -norm_sq(y) * area + r * r * pair(y, y);
    Ok(gaussian_normalization(n, 1.0) * total)
}

/// The `(y, h)` choice `h = −2a/r`, `y = k·z` that makes the spectral form
/// nonnegative on F-stable spheres, with the resulting value. `None` on
/// F-unstable spheres.
pub fn f_stability_certificate(n: usize, r: f64, d: &HarmonicDecomposition) -> Result<Option<(Vec<f64>, f64, f64)>> {
    check_sphere(n, r)?;
    let t = Thresholds::new(n);
    if !(r <= t.f_lower || r > t.f_upper) {
        return Ok(None);
    }
    let lam = sphere_lambda(n, r);
    let h = -2.0 * d.constant / r;
    let k = if lam >= 0.0 {
        1.0
    } else {
        // here 1 + λr < 0; need (1−k)² ≥ λ(λ+r)/(1+λr)
        let need = lam * (lam + r) / (1.0 + lam * r);
        1.0 + need.max(0.0).sqrt().max(1.0)
    };
    let y: Vec<f64> = d.linear.iter().map(|v| k * v).collect();
    let value = f_stability_form(n, r, d, &y, h)?;
    Ok(Some((y, h, value)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub n: usize,
    pub r: f64,
    pub lambda: f64,
    pub thresholds: Thresholds,
    pub f_stable: Verdict,
    pub weak_stable: Verdict,
    pub f_witness: Option<Witness>,
    pub weak_witness: Option<Witness>,
}

impl StabilityReport {
    /// Value reported in the sweep CSV: the F witness when F-unstable,
    /// otherwise the weak witness when weakly unstable.
    pub fn witness_value(&self) -> Option<f64> {
        self.f_witness.as_ref().or(self.weak_witness.as_ref()).map(|w| w.value)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.r,
            self.lambda,
            self.f_stable.is_stable(),
            self.weak_stable.is_stable(),
            self.witness_value().map(|v| v.to_string()).unwrap_or_default()
        )
    }
}

pub const SWEEP_CSV_HEADER: &str = "n,r,lambda,f_stable,weak_stable,witness_value";

pub fn stability_report(n: usize, r: f64) -> Result<StabilityReport> {
    let f = f_stability_verdict(n, r)?;
    let w = weak_stability_verdict(n, r)?;
    Ok(StabilityReport {
        n,
        r,
        lambda: sphere_lambda(n, r),
        thresholds: Thresholds::new(n),
        f_stable: f.verdict,
        weak_stable: w.verdict,
        f_witness: f.witness,
        weak_witness: w.witness,
    })
}

/// Reports for every `(n, r)` pair, in input order.
pub fn sweep(dims: &[usize], radii: &[f64]) -> Result<Vec<StabilityReport>> {
    let pairs: Vec<(usize, f64)> = dims.iter().flat_map(|&n| radii.iter().map(move |&r| (n, r))).collect();
    pairs.par_iter().map(|&(n, r)| stability_report(n, r)).collect()
}

pub fn sweep_csv(reports: &[StabilityReport]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use std::f64::consts::PI;

    #[test]
    fn spectrum_examples() {
        let s = sphere_spectrum(2, 1.0, 3).unwrap();
        let mus: Vec<f64> = s.iter().map(|e| e.eigenvalue).collect();
        assert_eq!(mus, vec![0.0, 2.0, 6.0, 12.0]);
        let mult: Vec<u128> = s.iter().map(|e| e.multiplicity).collect();
        assert_eq!(mult, vec![1, 3, 5, 7]);
        for (k, e) in sphere_spectrum(1, 2.0, 5).unwrap().iter().enumerate() {
            assert_eq!(e.eigenvalue, (k * k) as f64 / 4.0);
        }
        for n in 1..6 {
            let r = 0.37 * n as f64;
            assert!((sphere_spectrum(n, r, 1).unwrap()[1].eigenvalue * r * r - n as f64).abs() < 1e-12);
        }
        assert!(sphere_spectrum(2, 1.0, 0).is_err());
        assert_eq!(harmonic_multiplicity(3, 2), 9);
    }

    #[test]
    fn f_verdict_examples() {
        assert_eq!(f_stability_verdict(2, 1.3).unwrap().verdict, Verdict::Stable);
        assert_eq!(f_stability_verdict(2, 1.8).unwrap().verdict, Verdict::Stable);
        let v = f_stability_verdict(2, 1.6).unwrap();
        assert_eq!(v.verdict, Verdict::Unstable);
        let w = v.witness.unwrap();
        // closed form: (λ² + λr)‖⟨z,N⟩‖² with the optimum at y = z, h = 0
        let lam = sphere_lambda(2, 1.6);
        let g = sphere_grid(2, 1.6).unwrap();
        let z = ScalarField::NormalComponent(unit(3, 0)).evaluate_on(&g).unwrap();
        let norm2 = integrate(&g, &z.iter().map(|v| v * v).collect::<Vec<_>>(), true).unwrap();
        let want = (lam * lam + lam * 1.6) * norm2 / (4.0 * PI);
        assert!(w.value < 0.0);
        assert!((w.value - want).abs() < 1e-10 * want.abs(), "{} vs {want}", w.value);
        assert!(w.scale_velocity.abs() < 1e-8);
        assert!((w.center_velocity[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn boundaries_follow_closed_form_thresholds() {
        for n in 1..=3 {
            let t = Thresholds::new(n);
            assert_eq!(f_stability_verdict(n, t.f_lower).unwrap().verdict, Verdict::Stable);
            let at_upper = f_stability_verdict(n, t.f_upper).unwrap();
            assert_eq!(at_upper.verdict, Verdict::Unstable);
            assert!(at_upper.witness.unwrap().value < 0.0);
            assert_eq!(weak_stability_verdict(n, t.weak_lower).unwrap().verdict, Verdict::Stable);
            assert_eq!(weak_stability_verdict(n, t.weak_upper).unwrap().verdict, Verdict::Stable);
        }
    }

    #[test]
    fn weak_verdict_examples() {
        let t = Thresholds::new(1);
        assert!((t.weak_lower - 0.6180339887).abs() < 1e-9);
        assert!((t.weak_upper - 1.6180339887).abs() < 1e-9);
        assert_eq!(weak_stability_verdict(2, 1.0).unwrap().verdict, Verdict::Stable);
        let v = weak_stability_verdict(2, 1.2).unwrap();
        assert_eq!(v.verdict, Verdict::Unstable);
        assert!(v.witness.unwrap().value < 0.0);
    }

    #[test]
    fn operator_floor_examples() {
        assert!((weak_stability_operator_floor(2, 2f64.sqrt()).unwrap() + 1.0).abs() < 1e-12);
        assert!(weak_stability_operator_floor(2, 1.0).unwrap().abs() < 1e-12);
        for n in 1..=3 {
            for i in 1..300 {
                let r = 0.01 * i as f64;
                let floor = weak_stability_operator_floor(n, r).unwrap();
                let stable = weak_stability_verdict(n, r).unwrap().verdict.is_stable();
                if floor.abs() > 1e-9 {
                    assert_eq!(floor >= 0.0, stable, "n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn spectral_form_matches_quadrature() {
        let n = 2;
        for r in [0.9, 1.6, 2.2] {
            let lam = sphere_lambda(n, r);
            let g = sphere_grid(n, r).unwrap();
            let z = vec![0.3, -0.4, 1.0];
            let y = vec![0.5, 0.2, -0.1];
            let (a, h) = (0.7, -0.3);
            let q = crate::fields::QuadraticHarmonic::product(3, 0, 2).unwrap();
            let fq = ScalarField::Harmonic(q);
            let fv = fq.evaluate_on(&g).unwrap();
            let norm2 = integrate(&g, &fv.iter().map(|v| v * v).collect::<Vec<_>>(), true).unwrap();
            let speed = ScalarField::Sum(vec![
                (1.0, fq),
                (a, ScalarField::Constant(1.0)),
                (1.0, ScalarField::NormalComponent(z.clone())),
            ]);
            let spec = VariationSpec::normal(speed, 3).with_center_velocity(y.clone()).with_scale_velocity(h);
            let quad = analytic_second_variation_f(&g, &spec, lam).unwrap();
            let d = HarmonicDecomposition { higher: vec![(2, norm2)], constant: a, linear: z };
            let exact = f_stability_form(n, r, &d, &y, h).unwrap();
            assert!((quad - exact).abs() < 1e-10 * exact.abs().max(1.0), "r={r}: {quad} vs {exact}");
        }
    }

    #[test]
    fn spectral_form_examples() {
        for (n, r) in [(1, 0.8), (2, 1.7), (3, 2.5)] {
            let d = HarmonicDecomposition { higher: vec![], constant: 0.9, linear: vec![0.0; n + 1] };
            let v = f_stability_form(n, r, &d, &vec![0.0; n + 1], -2.0 * 0.9 / r).unwrap();
            assert!(v.abs() < 1e-12);
            let nf = n as f64;
            let d2 = HarmonicDecomposition { higher: vec![(2, 1.0)], constant: 0.0, linear: vec![0.0; n + 1] };
            let v2 = f_stability_form(n, r, &d2, &vec![0.0; n + 1], 0.0).unwrap();
            let coeff = ((r * r - nf - 0.5).powi(2) + 1.75) / (r * r);
            assert!((v2 - gaussian_normalization(n, 1.0) * coeff).abs() < 1e-12);
        }
        // k = 1 when λ ≥ 0
        let (n, r) = (2, 1.2);
        let lam = sphere_lambda(n, r);
        let z = vec![0.0, 1.0, 0.0];
        let d = HarmonicDecomposition { higher: vec![], constant: 0.0, linear: z.clone() };
        let v = f_stability_form(n, r, &d, &z, 0.0).unwrap();
        let pair = weighted_sphere_area(n, r) / 3.0;
        assert!((v - gaussian_normalization(n, 1.0) * lam * (lam + r) * pair).abs() < 1e-12);
        assert!(v >= 0.0);
    }

    #[test]
    fn norm_cross_check() {
        // ∫⟨z,N⟩² w = |z|²·A/(n+1)
        for n in 1..=3 {
            let r = 1.3;
            let g = sphere_grid(n, r).unwrap();
            let z = unit(n + 1, n);
            let v = ScalarField::NormalComponent(z).evaluate_on(&g).unwrap();
            let q = integrate(&g, &v.iter().map(|x| x * x).collect::<Vec<_>>(), true).unwrap();
            let area = crate::functionals::weighted_area(&g);
            assert!((q - area / (n as f64 + 1.0)).abs() < 1e-12 * area);
            assert!((area - weighted_sphere_area(n, r)).abs() < 1e-12 * area);
        }
    }

    #[test]
    fn certificates_nonnegative_on_stable_spheres() {
        for n in 1..=3 {
            for i in 1..=300 {
                let r = 0.01 * i as f64;
                let d = HarmonicDecomposition { higher: vec![(2, 0.3), (3, 0.1)], constant: -0.4, linear: unit(n + 1, 0) };
                match f_stability_certificate(n, r, &d).unwrap() {
                    Some((_, _, v)) => assert!(v >= -1e-14, "n={n} r={r}: {v}"),
                    None => assert!(!f_stability_verdict(n, r).unwrap().verdict.is_stable()),
                }
            }
        }
    }

    #[test]
    fn csv_row_layout() {
        let rep = stability_report(2, 1.6).unwrap();
        let row = rep.csv_row();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 6);
        assert_eq!(cols[3], "false");
        assert!(cols[5].parse::<f64>().unwrap() < 0.0);
        assert_eq!(stability_report(2, 0.5).unwrap().csv_row().split(',').next_back(), Some(""));
    }
}
