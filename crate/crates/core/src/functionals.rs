//! Weighted area, weighted volume, averaged λ, `J = A + λV` and the
//! F-functional at `s = 0`, all against the grid's Gaussian `(X0, t0)`.

use crate::quadrature::QuadratureGrid;
use crate::vector::dot;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalContext {
    pub center: Vec<f64>,
    pub scale: f64,
    pub lambda: f64,
}

/// `A = ∫ e^{−|X−X0|²/(2t0)} dμ`
pub fn weighted_area(grid: &QuadratureGrid) -> f64 {
    grid.integrate_fn(true, |_| 1.0)
}

/// `V = ∫ ⟨X − X0, N⟩ e^{−|X−X0|²/(2t0)} dμ`
pub fn weighted_volume(grid: &QuadratureGrid) -> f64 {
    grid.integrate_fn(true, |node| dot(&grid.offset(node), &node.sample.normal))
}

/// Gaussian-weighted average of `⟨(X−X0)/t0, N⟩ + H`.
pub fn mean_lambda(grid: &QuadratureGrid) -> f64 {
    let t0 = grid.scale();
    let num = grid.integrate_fn(true, |node| node.sample.lambda_value(grid.center(), t0));
    num / weighted_area(grid)
}

/// `J = A + λV`
pub fn j_functional(grid: &QuadratureGrid, lambda: f64) -> f64 {
    weighted_area(grid) + lambda * weighted_volume(grid)
}

/// `(4πt0)^{−n/2}`
pub fn gaussian_normalization(n: usize, scale: f64) -> f64 {
    (4.0 * PI * scale).powf(-(n as f64) / 2.0)
}

/// `F = (4πt0)^{−n/2}(A + λV)` at `s = 0`.
pub fn f_functional(grid: &QuadratureGrid, lambda: f64) -> f64 {
    gaussian_normalization(grid.surface().dim(), grid.scale()) * j_functional(grid, lambda)
}
