use super::GeometrySample;
use crate::error::{Error, Result};
use crate::vector::{axpy, dot, norm};

/// `S^n(r)` in `R^{n+1}` with the given center.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub n: usize,
    pub radius: f64,
    pub center: Vec<f64>,
}

impl Sphere {
    pub fn new(n: usize, radius: f64, center: Option<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sphere dimension must be at least 1".into()));
        }
        check_radius(radius)?;
        let center = center.unwrap_or_else(|| vec![0.0; n + 1]);
        if center.len() != n + 1 {
            return Err(Error::InvalidParameter(format!(
                "center has {} coordinates, expected {}",
                center.len(),
                n + 1
            )));
        }
        Ok(Self { n, radius, center })
    }

    pub fn is_centered(&self) -> bool {
        self.center.iter().all(|c| *c == 0.0)
    }

    pub fn lambda_exact(&self) -> Option<f64> {
        self.is_centered().then(|| self.n as f64 / self.radius - self.radius)
    }

    pub fn sample(&self, direction: &[f64]) -> Result<GeometrySample> {
        let omega = unit_direction(direction, self.n + 1)?;
        let position = axpy(&self.center, self.radius, &omega);
        let normal = omega.iter().map(|x| -x).collect();
        let frame = orthonormal_complement(&omega);
        Ok(GeometrySample::from_principal(
            position,
            normal,
            vec![1.0 / self.radius; self.n],
            frame,
        ))
    }
}

/// `S^k(r) × R^{n−k}` in `R^{n+1}`: the first `k + 1` coordinates carry the
/// round factor. For `k = 0` this is the single sheet `{x₁ = r}` with normal `−e₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub n: usize,
    pub k: usize,
    pub radius: f64,
}

impl Cylinder {
    pub fn new(n: usize, k: usize, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cylinder dimension must be at least 1".into()));
        }
        if k > n {
            return Err(Error::InvalidParameter(format!("sphere factor dimension {k} exceeds n = {n}")));
        }
        check_radius(radius)?;
        Ok(Self { n, k, radius })
    }

    /// Hyperplane at distance `offset ≥ 0`; offset 0 passes through the origin.
    pub fn hyperplane(n: usize, offset: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("hyperplane dimension must be at least 1".into()));
        }
        if !(offset.is_finite() && offset >= 0.0) {
            return Err(Error::InvalidParameter(format!("hyperplane offset {offset} must be finite and ≥ 0")));
        }
        Ok(Self { n, k: 0, radius: offset })
    }

    pub fn lambda_exact(&self) -> f64 {
        if self.k == 0 {
            -self.radius
        } else {
            self.k as f64 / self.radius - self.radius
        }
    }

    pub fn sample(&self, direction: &[f64], flat: &[f64]) -> Result<GeometrySample> {
        let m = self.n - self.k;
        if flat.len() != m {
            return Err(Error::InvalidParameter(format!(
                "expected {m} flat coordinates, got {}",
                flat.len()
            )));
        }
        let omega = if self.k == 0 {
            if direction != [1.0] {
                return Err(Error::InvalidParameter("k = 0 cylinder has the single direction [1.0]".into()));
            }
            vec![1.0]
        } else {
            unit_direction(direction, self.k + 1)?
        };
        let dim = self.n + 1;
        let mut position = vec![0.0; dim];
        let mut normal = vec![0.0; dim];
        for (i, w) in omega.iter().enumerate() {
            position[i] = self.radius * w;
            normal[i] = -w;
        }
        position[self.k + 1..].copy_from_slice(flat);

        let mut frame = Vec::with_capacity(self.n);
        for e in orthonormal_complement(&omega) {
            let mut v = vec![0.0; dim];
            v[..=self.k].copy_from_slice(&e);
            frame.push(v);
        }
        let mut curvatures = vec![1.0 / self.radius; self.k];
        for j in 0..m {
            let mut v = vec![0.0; dim];
            v[self.k + 1 + j] = 1.0;
            frame.push(v);
            curvatures.push(0.0);
        }
        Ok(GeometrySample::from_principal(position, normal, curvatures, frame))
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius {radius} must be positive and finite")))
    }
}

fn unit_direction(direction: &[f64], dim: usize) -> Result<Vec<f64>> {
    if direction.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "direction has {} coordinates, expected {dim}",
            direction.len()
        )));
    }
    let len = norm(direction);
    if !(len.is_finite() && len > 0.0) {
        return Err(Error::InvalidParameter("direction must be a nonzero vector".into()));
    }
    Ok(direction.iter().map(|x| x / len).collect())
}

/// Orthonormal basis of the complement of the unit vector `w`.
pub(crate) fn orthonormal_complement(w: &[f64]) -> Vec<Vec<f64>> {
    let dim = w.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim.saturating_sub(1));
    // Start from the axes least aligned with w.
    let mut axes: Vec<usize> = (0..dim).collect();
    axes.sort_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs()));
    for axis in axes {
        if basis.len() + 1 == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        v = axpy(&v, -dot(&v, w), w);
        for b in &basis {
            v = axpy(&v, -dot(&v, b), b);
        }
        let len = norm(&v);
        if len > 1e-8 {
            basis.push(v.iter().map(|x| x / len).collect());
        }
    }
    basis
}
