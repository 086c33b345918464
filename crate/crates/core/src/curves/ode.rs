//! Adaptive Dormand–Prince 4(5) for `x′ = cos θ, y′ = sin θ,
//! θ′ = λ + x sin θ − y cos θ` with the unwrapped polar angle `φ` carried
//! along as a fourth component.

use crate::error::{Error, Result};

pub type State = [f64; 4];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub fn rhs(lambda: f64, y: &State) -> State {
    let (s, c) = y[2].sin_cos();
    let r2 = y[0] * y[0] + y[1] * y[1];
    let cross = y[0] * s - y[1] * c;
    [c, s, lambda + cross, if r2 > 0.0 { cross / r2 } else { 0.0 }]
}

/// One step of size `h`: fifth-order solution and error estimate.
fn step(lambda: f64, y: &State, h: f64) -> (State, f64, f64) {
    let mut k = [[0.0; 4]; 7];
    for i in 0..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for d in 0..4 {
                yi[d] += h * A[i][j] * kj[d];
            }
        }
        k[i] = rhs(lambda, &yi);
    }
    let mut y5 = *y;
    let mut err = 0.0_f64;
    let mut scale = 0.0_f64;
    for d in 0..4 {
        let mut s5 = 0.0;
        let mut s4 = 0.0;
        for i in 0..7 {
            s5 += B5[i] * k[i][d];
            s4 += B4[i] * k[i][d];
        }
        y5[d] += h * s5;
        err = err.max((h * (s5 - s4)).abs());
        scale = scale.max(y5[d].abs());
    }
    (y5, err, scale)
}

/// Where an integration stops.
pub enum Stop<'a> {
    Length(f64),
    /// First sign change of the function relative to its sign after the first step.
    Crossing(&'a dyn Fn(&State) -> f64),
}

pub struct Trajectory {
    /// `(s, state)` at the requested output spacing.
    pub samples: Vec<(f64, State)>,
    pub end_s: f64,
    pub end: State,
}

pub struct Integrator {
    pub lambda: f64,
    pub tolerance: f64,
    pub max_arclength: f64,
}

impl Integrator {
    /// Integrates from `s = 0`. With `spacing` set, samples are recorded at
    /// every multiple of it and steps land on them exactly.
    pub fn run(&self, y0: State, stop: Stop, spacing: Option<f64>) -> Result<Trajectory> {
        let tol = self.tolerance;
        let limit = match stop {
            Stop::Length(l) => l,
            Stop::Crossing(_) => self.max_arclength,
        };
        let mut s = 0.0;
        let mut y = y0;
        let mut h = 1e-2_f64.min(limit);
        let mut samples = vec![(0.0, y0)];
        let mut next_out = 1usize;
        // reference sign comes from the first accepted step, so a start on
        // the zero set (up to roundoff) is not counted as a crossing
        let mut sign = 0.0;
        loop {
            if s >= limit {
                break;
            }
            let mut target = limit;
            if let Some(ds) = spacing {
                target = target.min(next_out as f64 * ds);
            }
            let h_try = h.min(target - s);
            let (y1, err, scale) = step(self.lambda, &y, h_try);
            let allowed = tol * (1.0 + scale);
            if err > allowed {
                h = h_try * (0.9 * (allowed / err).powf(0.2)).max(0.2);
                if h < 1e-14 * (1.0 + s) {
                    return Err(Error::StepUnderflow { s });
                }
                continue;
            }
            if let Stop::Crossing(g) = &stop {
                let v = g(&y1);
                if sign == 0.0 {
                    sign = v.signum();
                } else if v * sign < 0.0 || v == 0.0 {
                    // bisect the step length on fresh single steps from y
                    let (mut lo, mut hi) = (0.0, h_try);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if g(&step(self.lambda, &y, mid).0) * sign > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let end = step(self.lambda, &y, hi).0;
                    return Ok(Trajectory { samples, end_s: s + hi, end });
                }
            }
            s += h_try;
            y = y1;
            if let Some(ds) = spacing {
                if (s - next_out as f64 * ds).abs() <= 1e-12 * (1.0 + s) {
                    s = next_out as f64 * ds;
                    samples.push((s, y));
                    next_out += 1;
                }
            }
            if err > 0.0 {
                h = h_try * (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 5.0);
            } else {
                h = h_try * 5.0;
            }
        }
        match stop {
            Stop::Length(_) => Ok(Trajectory { samples, end_s: s, end: y }),
            Stop::Crossing(_) => Err(Error::ArclengthExhausted { budget: self.max_arclength }),
        }
    }
}
