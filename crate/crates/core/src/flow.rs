//! Weighted volume-preserving curve flow `∂X/∂t = (κ − α(t)) N` on closed
//! polylines, explicit Euler in time.
//!
//! `α(t) = Σ κᵢ⟨Nᵢ(t), Nᵢ⁰⟩Wᵢ / Σ ⟨Nᵢ(t), Nᵢ⁰⟩Wᵢ` with the initial vertex
//! normals `Nᵢ⁰` and weights `Wᵢ = e^{−|Xᵢ⁰|²/2} ℓᵢ⁰` frozen at `t = 0`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, PolylineCurve};
use crate::quadrature::QuadratureGrid;
use crate::vector::{compensated_sum, dot, KahanSum};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// `dt ≤ cfl · (min segment)²`
    pub cfl: f64,
    /// Smallest admissible `|Σ⟨N(t),N⁰⟩W| / ΣW`.
    pub alpha_floor: f64,
    /// Record a history sample every this many steps.
    pub record_every: usize,
    /// Test for self-intersection every this many steps (0 disables).
    pub intersection_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { cfl: 0.25, alpha_floor: 1e-3, record_every: 1, intersection_every: 10 }
    }
}

/// Data frozen at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenReference {
    pub positions: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl FrozenReference {
    pub fn new(curve: &PolylineCurve) -> Result<Self> {
        if !curve.closed {
            return Err(Error::InvalidParameter("the flow runs on closed curves".into()));
        }
        let mut normals = Vec::with_capacity(curve.len());
        let mut weights = Vec::with_capacity(curve.len());
        for (i, x) in curve.vertices.iter().enumerate() {
            let f = curve.vertex_frame(i)?;
            normals.push(f.normal);
            weights.push((-0.5 * (x[0] * x[0] + x[1] * x[1])).exp() * f.dual_length);
        }
        Ok(Self { positions: curve.vertices.clone(), normals, weights })
    }

    /// `V = Σ ⟨Xᵢ, Nᵢ⁰⟩ Wᵢ`
    pub fn volume_of(&self, vertices: &[[f64; 2]]) -> f64 {
        compensated_sum(
            vertices
                .iter()
                .zip(&self.normals)
                .zip(&self.weights)
                .map(|((x, n), w)| (x[0] * n[0] + x[1] * n[1]) * w),
        )
    }
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub curve: PolylineCurve,
    pub reference: Arc<FrozenReference>,
}

impl FlowState {
    pub fn new(curve: PolylineCurve) -> Result<Self> {
        let reference = Arc::new(FrozenReference::new(&curve)?);
        Ok(Self { t: 0.0, curve, reference })
    }

    pub fn volume(&self) -> f64 {
        self.reference.volume_of(&self.curve.vertices)
    }

    /// Largest stable explicit step.
    pub fn cfl_bound(&self, config: &FlowConfig) -> f64 {
        let h = self.curve.min_segment();
        config.cfl * h * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    #[serde(rename = "V")]
    pub volume: f64,
    pub alpha: f64,
    pub min_seg: f64,
    pub max_displacement: f64,
}

#[derive(Debug, Clone)]
pub struct FlowHistory {
    pub samples: Vec<FlowSample>,
    pub final_state: FlowState,
}

impl FlowHistory {
    /// `max_t |V(t) − V(0)| / |V(0)|`
    pub fn max_relative_volume_defect(&self) -> f64 {
        let v0 = self.samples[0].volume;
        self.samples.iter().map(|s| (s.volume - v0).abs()).fold(0.0, f64::max) / v0.abs()
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.samples {
            out.push_str(&serde_json::to_string(s).expect("flow samples serialize"));
            out.push('\n');
        }
        out
    }
}

struct Forces {
    curvature: Vec<f64>,
    normals: Vec<[f64; 2]>,
    alpha: f64,
}

fn forces(state: &FlowState, config: &FlowConfig) -> Result<Forces> {
    let m = state.curve.len();
    let mut curvature = Vec::with_capacity(m);
    let mut normals = Vec::with_capacity(m);
    let (mut num, mut den, mut mass) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for i in 0..m {
        let f = state.curve.vertex_frame(i)?;
        let r = &state.reference;
        let c = (f.normal[0] * r.normals[i][0] + f.normal[1] * r.normals[i][1]) * r.weights[i];
        num.add(f.curvature * c);
        den.add(c);
        mass.add(r.weights[i]);
        curvature.push(f.curvature);
        normals.push(f.normal);
    }
    let den = den.value();
    if den.abs() < config.alpha_floor * mass.value() {
        return Err(Error::DegenerateAlpha { value: den, floor: config.alpha_floor * mass.value(), t: state.t });
    }
    Ok(Forces { curvature, normals, alpha: num.value() / den })
}

pub fn compute_alpha(state: &FlowState, config: &FlowConfig) -> Result<f64> {
    Ok(forces(state, config)?.alpha)
}

/// One explicit Euler step; returns the new state and its diagnostics.
pub fn step(state: &FlowState, dt: f64, config: &FlowConfig) -> Result<(FlowState, FlowSample)> {
    let bound = state.cfl_bound(config);
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::CflViolation { dt, bound });
    }
    let f = forces(state, config)?;
    let mut max_disp: f64 = 0.0;
    let vertices: Vec<[f64; 2]> = state
        .curve
        .vertices
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let speed = dt * (f.curvature[i] - f.alpha);
            max_disp = max_disp.max(speed.abs());
            [x[0] + speed * f.normals[i][0], x[1] + speed * f.normals[i][1]]
        })
        .collect();
    let mut curve = PolylineCurve::new(vertices, true)?;
    curve.lambda = None;
    let next = FlowState { t: state.t + dt, curve, reference: Arc::clone(&state.reference) };
    let sample = FlowSample {
        t: next.t,
        volume: next.volume(),
        alpha: f.alpha,
        min_seg: next.curve.min_segment(),
        max_displacement: max_disp,
    };
    Ok((next, sample))
}

pub type Observer<'a> = &'a mut dyn FnMut(&FlowSample);

/// Runs `round(duration/dt)` steps from `initial`, notifying observers on
/// every recorded sample.
pub fn run(
    initial: PolylineCurve,
    duration: f64,
    dt: f64,
    config: &FlowConfig,
    observers: &mut [Observer<'_>],
) -> Result<FlowHistory> {
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration {duration} must be finite and ≥ 0")));
    }
    let mut state = FlowState::new(initial)?;
    let steps = (duration / dt).round() as usize;
    let first = FlowSample {
        t: 0.0,
        volume: state.volume(),
        alpha: compute_alpha(&state, config)?,
        min_seg: state.curve.min_segment(),
        max_displacement: 0.0,
    };
    for obs in observers.iter_mut() {
        obs(&first);
    }
    let mut samples = vec![first];
    let every = config.record_every.max(1);
    for k in 1..=steps {
        let (next, sample) = step(&state, dt, config)?;
        state = next;
        if config.intersection_every > 0 && k % config.intersection_every == 0 {
            if let Some((a, b)) = state.curve.first_self_intersection() {
                return Err(Error::SelfIntersection { t: state.t, first: a, second: b });
            }
        }
        if k % every == 0 || k == steps {
            for obs in observers.iter_mut() {
                obs(&sample);
            }
            samples.push(sample);
        }
    }
    Ok(FlowHistory { samples, final_state: state })
}

/// Round sphere `S^n(r)` under the flow: `dr/dt = α − n/r` with `α = H`,
/// so the radius is stationary. Samples record `V = −r·|S^n(r)| e^{−r²/2}`.
pub fn run_sphere(n: usize, radius: f64, duration: f64, dt: f64) -> Result<Vec<FlowSample>> {
    if n == 0 || !(radius > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter("sphere flow needs n ≥ 1, r > 0, dt > 0".into()));
    }
    let area = unit_sphere_area(n);
    let mut r = radius;
    let steps = (duration / dt).round() as usize;
    let volume = |r: f64| -r * area * r.powi(n as i32) * (-0.5 * r * r).exp();
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let h = n as f64 / r;
        // normals never rotate, so the weighted mean of H is H itself
        let alpha = h;
        if k > 0 {
            r += dt * (alpha - h);
        }
        out.push(FlowSample { t: k as f64 * dt, volume: volume(r), alpha, min_seg: f64::NAN, max_displacement: 0.0 });
    }
    Ok(out)
}

/// `(1 + amplitude·⟨z, ω⟩)·radius·ω`: a circle moved by the normal speed
/// `amplitude·radius·⟨z, N⟩` with the inward normal.
pub fn perturbed_circle(radius: f64, amplitude: f64, direction: [f64; 2], m: usize) -> Result<PolylineCurve> {
    PolylineCurve::from_parametrization(m, |th| {
        let (s, c) = th.sin_cos();
        let rho = radius * (1.0 + amplitude * (direction[0] * c + direction[1] * s));
        [rho * c, rho * s]
    })
}

/// Sup over grid nodes of `|(β0/2)⟨X,N⟩ − (H − α(0))|`, the normal part of
/// the self-similar ansatz `X(t) = √(1 + β0 t)·X` at `t = 0`, with
/// `α(0) = ∫ H w / ∫ w`.
pub fn self_similar_residual(grid: &QuadratureGrid, beta0: f64) -> f64 {
    let area = grid.integrate_fn(true, |_| 1.0);
    let alpha0 = grid.integrate_fn(true, |n| n.sample.mean_curvature) / area;
    grid.nodes()
        .iter()
        .map(|node| {
            let s = &node.sample;
            (0.5 * beta0 * dot(&s.position, &s.normal) - (s.mean_curvature - alpha0)).abs()
        })
        .fold(0.0, f64::max)
}
