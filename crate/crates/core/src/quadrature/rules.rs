//! Gauss–Legendre and Gauss–Hermite rules by Newton iteration on the
//! three-term recurrences.

use std::f64::consts::PI;

/// Nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Physicists' rule for `∫ g(ξ) e^{−ξ²} dξ`, nodes ascending.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    let mut z: f64 = 0.0;
    for i in 0..m.div_ceil(2) {
        z = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * mf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * mf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() < 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[m - 1 - i] = -z;
        let w = 2.0 / (pp * pp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Upper bound on `erfc(x)` for `x > 0`.
pub fn erfc_bound(x: f64) -> f64 {
    (-x * x).exp() / (x * PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for k in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-13, "degree {k}: {q} vs {exact}");
        }
    }

    #[test]
    fn hermite_moments() {
        for m in [20, 32, 64] {
            let (x, w) = gauss_hermite(m);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            let mass: f64 = w.iter().sum();
            assert!((mass - PI.sqrt()).abs() < 1e-13 * PI.sqrt(), "m={m} mass {mass}");
            let second: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            assert!((second - PI.sqrt() / 2.0).abs() < 1e-13);
            let fourth: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
            assert!((fourth - 0.75 * PI.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_order_twenty_tail_is_negligible() {
        let (x, _) = gauss_hermite(20);
        assert!(erfc_bound(*x.last().unwrap()) < 1e-12);
    }
}
