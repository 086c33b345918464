use std::fmt::Write as _;
use std::path::Path;

use super::GeometrySample;
use crate::error::{Error, Result};
use crate::vector::{cross2, rot90};

/// Planar polyline. Closed curves are traversed counterclockwise for the
/// convex-positive curvature convention; the orientation is never changed
/// implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineCurve {
    pub vertices: Vec<[f64; 2]>,
    pub closed: bool,
    /// λ when the curve was produced as a λ-curve.
    pub lambda: Option<f64>,
}

pub const MIN_CLOSED_VERTICES: usize = 8;

impl PolylineCurve {
    pub fn new(vertices: Vec<[f64; 2]>, closed: bool) -> Result<Self> {
        let min = if closed { MIN_CLOSED_VERTICES } else { 2 };
        if vertices.len() < min {
            return Err(Error::InvalidParameter(format!(
                "polyline needs at least {min} vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(Error::InvalidParameter(format!("vertex {i} is not finite")));
        }
        let m = vertices.len();
        let segments = if closed { m } else { m - 1 };
        for i in 0..segments {
            let a = vertices[i];
            let b = vertices[(i + 1) % m];
            if a == b {
                return Err(Error::DegenerateSegment { index: i });
            }
        }
        Ok(Self { vertices, closed, lambda: None })
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    /// Regular `m`-gon inscribed in the circle of the given radius, counterclockwise.
    pub fn circle(radius: f64, m: usize) -> Result<Self> {
        Self::ellipse(radius, radius, m)
    }

    /// Ellipse `(a cos θ, b sin θ)` sampled uniformly in θ, counterclockwise.
    pub fn ellipse(a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter("ellipse semi-axes must be positive".into()));
        }
        Self::from_parametrization(m, |theta| [a * theta.cos(), b * theta.sin()])
    }

    /// Closed curve through `gamma(2πi/m)`, `i = 0..m`.
    pub fn from_parametrization(m: usize, gamma: impl Fn(f64) -> [f64; 2]) -> Result<Self> {
        let vertices = (0..m)
            .map(|i| gamma(std::f64::consts::TAU * i as f64 / m as f64))
            .collect();
        Self::new(vertices, true)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.len()
        } else {
            self.len() - 1
        }
    }

    /// Segment from vertex `i` to vertex `i + 1`.
    pub fn segment(&self, i: usize) -> [f64; 2] {
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % self.len()];
        [b[0] - a[0], b[1] - a[1]]
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        let s = self.segment(i);
        s[0].hypot(s[1])
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segment_count()).map(|i| self.segment_length(i)).sum()
    }

    pub fn min_segment(&self) -> f64 {
        (0..self.segment_count())
            .map(|i| self.segment_length(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed enclosed area (positive for counterclockwise closed curves).
    pub fn signed_area(&self) -> f64 {
        let m = self.len();
        0.5 * (0..m)
            .map(|i| cross2(self.vertices[i], self.vertices[(i + 1) % m]))
            .sum::<f64>()
    }

    /// Indices of the vertices before and after `i`.
    pub fn neighbors(&self, i: usize) -> Result<(usize, usize)> {
        let m = self.len();
        if i >= m {
            return Err(Error::InvalidParameter(format!("vertex {i} out of range (m = {m})")));
        }
        if self.closed {
            Ok(((i + m - 1) % m, (i + 1) % m))
        } else if i == 0 || i + 1 == m {
            Err(Error::InvalidParameter(format!("vertex {i} is an endpoint of an open polyline")))
        } else {
            Ok((i - 1, i + 1))
        }
    }

    /// Arclength attributed to vertex `i`: half of each adjacent segment.
    pub fn dual_length(&self, i: usize) -> f64 {
        let m = self.len();
        if self.closed {
            0.5 * (self.segment_length((i + m - 1) % m) + self.segment_length(i))
        } else if i == 0 {
            0.5 * self.segment_length(0)
        } else if i + 1 == m {
            0.5 * self.segment_length(m - 2)
        } else {
            0.5 * (self.segment_length(i - 1) + self.segment_length(i))
        }
    }

    /// Unit tangent, unit normal `J·T`, curvature and dual length at an interior vertex.
    ///
    /// Curvature is the turning angle between adjacent segments divided by the
    /// dual length; the normal bisects the two segment normals.
    pub fn vertex_frame(&self, i: usize) -> Result<VertexFrame> {
        let (prev, _) = self.neighbors(i)?;
        let s0 = self.segment(prev);
        let s1 = self.segment(i);
        let l0 = s0[0].hypot(s0[1]);
        let l1 = s1[0].hypot(s1[1]);
        if l0 == 0.0 {
            return Err(Error::DegenerateSegment { index: prev });
        }
        if l1 == 0.0 {
            return Err(Error::DegenerateSegment { index: i });
        }
        let t0 = [s0[0] / l0, s0[1] / l0];
        let t1 = [s1[0] / l1, s1[1] / l1];
        let turn = cross2(t0, t1).atan2(t0[0] * t1[0] + t0[1] * t1[1]);
        let bis = [t0[0] + t1[0], t0[1] + t1[1]];
        let bl = bis[0].hypot(bis[1]);
        if bl < 1e-12 {
            return Err(Error::DegenerateSegment { index: i });
        }
        let tangent = [bis[0] / bl, bis[1] / bl];
        let dual = 0.5 * (l0 + l1);
        Ok(VertexFrame {
            tangent,
            normal: rot90(tangent),
            curvature: turn / dual,
            dual_length: dual,
            prev_length: l0,
            next_length: l1,
        })
    }

    pub fn curvature(&self, i: usize) -> Result<f64> {
        Ok(self.vertex_frame(i)?.curvature)
    }

    pub fn sample(&self, i: usize) -> Result<GeometrySample> {
        let f = self.vertex_frame(i)?;
        Ok(GeometrySample::from_principal(
            self.vertices[i].to_vec(),
            f.normal.to_vec(),
            vec![f.curvature],
            vec![f.tangent.to_vec()],
        ))
    }

    /// First and second arclength derivatives at vertex `i` of a per-vertex
    /// sequence, by the three-point stencil on the adjacent segment lengths.
    pub fn arclength_derivatives(&self, values: &[f64], i: usize) -> Result<(f64, f64)> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch { got: values.len(), expected: self.len() });
        }
        let (prev, next) = self.neighbors(i)?;
        self.stencil(i, [values[prev], values[i], values[next]])
    }

    /// Same stencil given only the values at `i − 1`, `i`, `i + 1`.
    pub fn stencil(&self, i: usize, [fm, f0, fp]: [f64; 3]) -> Result<(f64, f64)> {
        let (prev, _) = self.neighbors(i)?;
        let hm = self.segment_length(prev);
        let hp = self.segment_length(i);
        let d1 = -hp / (hm * (hm + hp)) * fm + (hp - hm) / (hm * hp) * f0 + hm / (hp * (hm + hp)) * fp;
        let d2 = 2.0 * (fm / (hm * (hm + hp)) - f0 / (hm * hp) + fp / (hp * (hm + hp)));
        Ok((d1, d2))
    }

    /// First pair of non-adjacent segments that intersect, if any.
    pub fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let segs = self.segment_count();
        let m = self.len();
        let boxes: Vec<[f64; 4]> = (0..segs)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % m];
                [a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1])]
            })
            .collect();
        for i in 0..segs {
            for j in i + 2..segs {
                if self.closed && i == 0 && j == segs - 1 {
                    continue;
                }
                let (bi, bj) = (boxes[i], boxes[j]);
                if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                    continue;
                }
                if segments_intersect(
                    self.vertices[i],
                    self.vertices[(i + 1) % m],
                    self.vertices[j],
                    self.vertices[(j + 1) % m],
                ) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_embedded(&self) -> bool {
        self.first_self_intersection().is_none()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for v in &self.vertices {
            let _ = writeln!(out, "{},{}", v[0], v[1]);
        }
        let _ = writeln!(out, "# closed={}", self.closed);
        if let Some(l) = self.lambda {
            let _ = writeln!(out, "# lambda={l}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "x,y" => {}
            _ => return Err(Error::Parse("curve CSV must start with the header `x,y`".into())),
        }
        let mut vertices = Vec::new();
        let mut closed = None;
        let mut lambda = None;
        for (ln, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("line {}: malformed metadata `{line}`", ln + 1)))?;
                match key.trim() {
                    "closed" => {
                        closed = Some(value.trim().parse::<bool>().map_err(|e| {
                            Error::Parse(format!("line {}: closed flag: {e}", ln + 1))
                        })?)
                    }
                    "lambda" => {
                        lambda = Some(value.trim().parse::<f64>().map_err(|e| {
                            Error::Parse(format!("line {}: lambda: {e}", ln + 1))
                        })?)
                    }
                    other => {
                        return Err(Error::Parse(format!("line {}: unknown metadata key `{other}`", ln + 1)))
                    }
                }
                continue;
            }
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `x,y`", ln + 1)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
            };
            vertices.push([parse(x)?, parse(y)?]);
        }
        let closed = closed.ok_or_else(|| Error::Parse("missing `# closed=<bool>` line".into()))?;
        let mut curve = Self::new(vertices, closed)?;
        curve.lambda = lambda;
        Ok(curve)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexFrame {
    pub tangent: [f64; 2],
    pub normal: [f64; 2],
    pub curvature: f64,
    pub dual_length: f64,
    pub prev_length: f64,
    pub next_length: f64,
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    cross2([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Planar curve times `R^m`: `n = 1 + m` in `R^{2+m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveProduct {
    pub curve: PolylineCurve,
    pub flat_dim: usize,
}

impl CurveProduct {
    pub fn new(curve: PolylineCurve, flat_dim: usize) -> Result<Self> {
        if !curve.closed {
            return Err(Error::InvalidParameter("curve products need a closed base curve".into()));
        }
        if flat_dim == 0 {
            return Err(Error::InvalidParameter("curve products need at least one flat dimension".into()));
        }
        Ok(Self { curve, flat_dim })
    }

    pub fn sample(&self, vertex: usize, flat: &[f64]) -> Result<GeometrySample> {
        if flat.len() != self.flat_dim {
            return Err(Error::InvalidParameter(format!(
                "expected {} flat coordinates, got {}",
                self.flat_dim,
                flat.len()
            )));
        }
        let f = self.curve.vertex_frame(vertex)?;
        let dim = 2 + self.flat_dim;
        let x = self.curve.vertices[vertex];
        let mut position = vec![x[0], x[1]];
        position.extend_from_slice(flat);
        let mut normal = vec![0.0; dim];
        normal[..2].copy_from_slice(&f.normal);
        let mut tangent = vec![0.0; dim];
        tangent[..2].copy_from_slice(&f.tangent);
        let mut frame = vec![tangent];
        let mut curvatures = vec![f.curvature];
        for j in 0..self.flat_dim {
            let mut e = vec![0.0; dim];
            e[2 + j] = 1.0;
            frame.push(e);
            curvatures.push(0.0);
        }
        Ok(GeometrySample::from_principal(position, normal, curvatures, frame))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polygon_curvature_is_second_order() {
        let err = |m: usize| {
            let c = PolylineCurve::circle(2.0, m).unwrap();
            (c.curvature(3).unwrap() - 0.5).abs()
        };
        let (e1, e2) = (err(256), err(512));
        let h = 2.0 * PI / 512.0;
        assert!(e2 <= 0.1 * h * h, "error {e2} vs h² = {}", h * h);
        assert!(e1 / e2 > 3.9, "order ratio {}", e1 / e2);
    }

    #[test]
    fn circle_orientation_and_normal() {
        let c = PolylineCurve::circle(1.0, 64).unwrap();
        assert!(c.signed_area() > 0.0);
        let g = c.sample(0).unwrap();
        assert!((g.normal[0] + 1.0).abs() < 1e-12 && g.normal[1].abs() < 1e-12);
        assert!(g.mean_curvature > 0.0);
    }

    #[test]
    fn degenerate_segment_reports_index() {
        let mut v: Vec<[f64; 2]> = (0..10).map(|i| [(i as f64).cos(), (i as f64).sin()]).collect();
        v[4] = v[3];
        match PolylineCurve::new(v, true) {
            Err(Error::DegenerateSegment { index }) => assert_eq!(index, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_vertices_rejected() {
        assert!(PolylineCurve::circle(1.0, 7).is_err());
    }

    #[test]
    fn embeddedness_fixtures() {
        assert!(PolylineCurve::circle(1.0, 200).unwrap().is_embedded());
        assert!(PolylineCurve::ellipse(2.0, 1.0, 300).unwrap().is_embedded());
        let figure_eight =
            PolylineCurve::from_parametrization(200, |t| [t.sin(), (2.0 * t).sin() / 2.0]).unwrap();
        assert!(!figure_eight.is_embedded());
    }

    #[test]
    fn csv_round_trip() {
        let c = PolylineCurve::ellipse(2.0, 1.0, 16).unwrap().with_lambda(-0.5);
        let text = c.to_csv();
        assert!(text.starts_with("x,y\n"));
        assert!(text.contains("# closed=true"));
        assert!(text.contains("# lambda=-0.5"));
        assert_eq!(PolylineCurve::from_csv(&text).unwrap(), c);
    }

    #[test]
    fn csv_rejects_unknown_metadata() {
        let text = "x,y\n0,0\n1,0\n# closed=false\n# colour=red\n";
        assert!(PolylineCurve::from_csv(text).is_err());
    }

    #[test]
    fn three_point_derivatives_exact_on_quadratics() {
        let c = PolylineCurve::new(vec![[0.0, 0.0], [0.3, 0.0], [1.0, 0.0]], false).unwrap();
        let vals = [0.0, 0.09, 1.0];
        let (d1, d2) = c.arclength_derivatives(&vals, 1).unwrap();
        assert!((d1 - 0.6).abs() < 1e-12);
        assert!((d2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_sample_extends_curve() {
        let p = CurveProduct::new(PolylineCurve::circle(1.0, 64).unwrap(), 2).unwrap();
        let g = p.sample(5, &[0.1, 0.2]).unwrap();
        assert_eq!(g.position.len(), 4);
        assert_eq!(g.principal_curvatures[1..], [0.0, 0.0]);
        assert_eq!(g.position[2..], [0.1, 0.2]);
    }
}
