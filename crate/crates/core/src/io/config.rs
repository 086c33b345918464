use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curves::{shoot_closed, product_with_line, ShootOptions, ShootTarget};
use crate::error::{Error, Result};
use crate::geometry::{CurveProduct, Hypersurface, PolylineCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Flow,
    Spectrum,
    Stability,
    Curve,
    Growth,
    Variation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Flow => "flow",
            Command::Spectrum => "spectrum",
            Command::Stability => "stability",
            Command::Curve => "curve",
            Command::Growth => "growth",
            Command::Variation => "variation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Sphere { n: usize, radius: f64 },
    Cylinder { n: usize, k: usize, radius: f64 },
    Hyperplane { n: usize, offset: f64 },
    /// Regular polygon on a circle, with `λ = 1/r − r`.
    Circle {
        radius: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
        #[serde(default)]
        flat_dim: usize,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default = "default_vertices")]
        vertices: usize,
    },
    /// Closed curve from a CSV file, optionally times `R^flat_dim`.
    Curve {
        path: PathBuf,
        #[serde(default)]
        flat_dim: usize,
    },
    /// Closed `q`-lobed λ-curve shot from a bracket of starting radii.
    ShotCurve {
        lambda: f64,
        rho_min: f64,
        rho_max: f64,
        lobes: usize,
        #[serde(default)]
        flat_dim: usize,
    },
}

fn default_vertices() -> usize {
    1024
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    check(v.is_finite() && v > 0.0, || format!("`{name}` must be positive and finite, got {v}"))
}

impl SurfaceSpec {
    fn validate(&self) -> Result<()> {
        let dims = |n: usize| check((1..=8).contains(&n), || format!("`n` must be in 1..=8, got {n}"));
        let verts = |m: usize| check((8..=100_000).contains(&m), || format!("`vertices` must be in 8..=100000, got {m}"));
        let flat = |m: usize| check(m <= 4, || format!("`flat_dim` must be at most 4, got {m}"));
        match self {
            SurfaceSpec::Sphere { n, radius } => {
                dims(*n)?;
                positive("radius", *radius)
            }
            SurfaceSpec::Cylinder { n, k, radius } => {
                dims(*n)?;
                check(k <= n, || format!("`k` must not exceed `n` ({k} > {n})"))?;
                positive("radius", *radius)
            }
            SurfaceSpec::Hyperplane { n, offset } => {
                dims(*n)?;
                check(offset.is_finite() && *offset >= 0.0, || "`offset` must be ≥ 0".into())
            }
            SurfaceSpec::Circle { radius, vertices, flat_dim } => {
                positive("radius", *radius)?;
                verts(*vertices)?;
                flat(*flat_dim)
            }
            SurfaceSpec::Ellipse { a, b, vertices } => {
                positive("a", *a)?;
                positive("b", *b)?;
                verts(*vertices)
            }
            SurfaceSpec::Curve { flat_dim, .. } => flat(*flat_dim),
            SurfaceSpec::ShotCurve { lambda, rho_min, rho_max, lobes, flat_dim } => {
                check(lambda.is_finite(), || "`lambda` must be finite".into())?;
                positive("rho_min", *rho_min)?;
                check(rho_max > rho_min, || "`rho_max` must exceed `rho_min`".into())?;
                check((2..=12).contains(lobes), || "`lobes` must be in 2..=12".into())?;
                flat(*flat_dim)
            }
        }
    }

    /// Builds the hypersurface; relative curve paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Hypersurface> {
        let with_flat = |c: PolylineCurve, m: usize| -> Result<Hypersurface> {
            if m == 0 {
                Ok(Hypersurface::polyline(c))
            } else if c.lambda.is_some() {
                product_with_line(&c, m)
            } else {
                Ok(Hypersurface::Product(CurveProduct::new(c, m)?))
            }
        };
        match self {
            SurfaceSpec::Sphere { n, radius } => Hypersurface::sphere(*n, *radius),
            SurfaceSpec::Cylinder { n, k, radius } => Hypersurface::cylinder(*n, *k, *radius),
            SurfaceSpec::Hyperplane { n, offset } => Hypersurface::hyperplane(*n, *offset),
            SurfaceSpec::Circle { radius, vertices, flat_dim } => {
                with_flat(PolylineCurve::circle(*radius, *vertices)?.with_lambda(1.0 / radius - radius), *flat_dim)
            }
            SurfaceSpec::Ellipse { a, b, vertices } => Ok(Hypersurface::polyline(PolylineCurve::ellipse(*a, *b, *vertices)?)),
            SurfaceSpec::Curve { path, flat_dim } => {
                let p = if path.is_absolute() { path.clone() } else { base.join(path) };
                with_flat(PolylineCurve::read_csv(&p)?, *flat_dim)
            }
            SurfaceSpec::ShotCurve { lambda, rho_min, rho_max, lobes, flat_dim } => {
                let c = shoot_closed(*lambda, (*rho_min, *rho_max), ShootTarget::Lobes(*lobes), &ShootOptions::default())?;
                with_flat(c.curve, *flat_dim)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowParams {
    pub radius: f64,
    pub amplitude: f64,
    pub vertices: usize,
    pub dt: f64,
    pub duration: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self { radius: 1.0, amplitude: 0.05, vertices: 256, dt: 1e-4, duration: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepParams {
    pub dims: Vec<usize>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self { dims: vec![1, 2, 3], r_min: 0.01, r_max: 3.0, r_step: 0.01 }
    }
}

impl SweepParams {
    /// Grid values rounded to the step's decimal precision.
    pub fn radii(&self) -> Vec<f64> {
        let count = ((self.r_max - self.r_min) / self.r_step + 1e-9).floor() as usize;
        (0..=count).map(|i| round12(self.r_min + i as f64 * self.r_step)).collect()
    }
}

pub(crate) fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumParams {
    pub n: usize,
    pub radius: f64,
    pub k_max: usize,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self { n: 2, radius: 1.0, k_max: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveParams {
    pub lambda: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub samples: usize,
    pub max_lobes: usize,
    pub spacing: f64,
    pub flat_dim: usize,
}

impl Default for CurveParams {
    fn default() -> Self {
        Self { lambda: -0.5, rho_min: 2.0, rho_max: 5.0, samples: 31, max_lobes: 3, spacing: 2e-3, flat_dim: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrowthParams {
    pub radii: Vec<f64>,
}

impl Default for GrowthParams {
    fn default() -> Self {
        Self { radii: vec![4.0, 8.0, 16.0, 32.0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedKind {
    Constant,
    Height,
    NormalComponent,
    SquaredNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationParams {
    /// One of A, V, F, J, T.
    pub functional: String,
    pub speed: SpeedKind,
    /// Axis of `a` for height and normal-component speeds.
    pub axis: usize,
    pub center_velocity: Vec<f64>,
    pub scale_velocity: f64,
    pub epsilon: f64,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            functional: "F".into(),
            speed: SpeedKind::Constant,
            axis: 0,
            center_velocity: vec![],
            scale_velocity: 0.0,
            epsilon: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub flow: FlowParams,
    #[serde(default)]
    pub stability: SweepParams,
    #[serde(default)]
    pub spectrum: SpectrumParams,
    #[serde(default)]
    pub curve: CurveParams,
    #[serde(default)]
    pub growth: GrowthParams,
    #[serde(default)]
    pub variation: VariationParams,
}

fn default_resolution() -> usize {
    24
}

impl Default for Scenario {
    fn default() -> Self {
        toml::from_str("").expect("empty scenario parses")
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check((8..=512).contains(&self.resolution), || format!("`resolution` must be in 8..=512, got {}", self.resolution))?;
        if let Some(t) = self.tolerance {
            check(t > 0.0 && t < 1.0, || format!("`tolerance` must be in (0, 1), got {t}"))?;
        }
        if let Some(s) = &self.surface {
            s.validate()?;
        }
        let f = &self.flow;
        positive("flow.radius", f.radius)?;
        check(f.amplitude.abs() < 0.5, || "`flow.amplitude` must be below 0.5 in magnitude".into())?;
        check((8..=100_000).contains(&f.vertices), || "`flow.vertices` must be in 8..=100000".into())?;
        positive("flow.dt", f.dt)?;
        check(f.duration.is_finite() && (0.0..=100.0).contains(&f.duration), || "`flow.duration` must be in [0, 100]".into())?;
        let w = &self.stability;
        check(!w.dims.is_empty() && w.dims.iter().all(|n| (1..=8).contains(n)), || "`stability.dims` must list values in 1..=8".into())?;
        positive("stability.r_min", w.r_min)?;
        positive("stability.r_step", w.r_step)?;
        check(w.r_max >= w.r_min, || "`stability.r_max` must be ≥ `r_min`".into())?;
        check((w.r_max - w.r_min) / w.r_step <= 1e5, || "stability sweep has more than 1e5 radii".into())?;
        let sp = &self.spectrum;
        check((1..=8).contains(&sp.n), || "`spectrum.n` must be in 1..=8".into())?;
        positive("spectrum.radius", sp.radius)?;
        check((1..=64).contains(&sp.k_max), || "`spectrum.k_max` must be in 1..=64".into())?;
        let c = &self.curve;
        check(c.lambda.is_finite(), || "`curve.lambda` must be finite".into())?;
        positive("curve.rho_min", c.rho_min)?;
        check(c.rho_max > c.rho_min, || "`curve.rho_max` must exceed `rho_min`".into())?;
        check((2..=10_000).contains(&c.samples), || "`curve.samples` must be in 2..=10000".into())?;
        check((2..=12).contains(&c.max_lobes), || "`curve.max_lobes` must be in 2..=12".into())?;
        check(c.spacing > 1e-5 && c.spacing <= 0.1, || "`curve.spacing` must be in (1e-5, 0.1]".into())?;
        check(c.flat_dim <= 4, || "`curve.flat_dim` must be at most 4".into())?;
        let g = &self.growth;
        check(g.radii.len() >= 4, || "`growth.radii` needs at least 4 values".into())?;
        check(g.radii.windows(2).all(|w| w[1] > w[0]) && g.radii[0] > 0.0, || "`growth.radii` must be positive and increasing".into())?;
        let v = &self.variation;
        v.functional.parse::<crate::variation::FunctionalKind>().map_err(|e| Error::Config(e.to_string()))?;
        check(v.epsilon > 0.0 && v.epsilon < 1.0, || "`variation.epsilon` must be in (0, 1)".into())?;
        check(v.scale_velocity.is_finite(), || "`variation.scale_velocity` must be finite".into())?;
        Ok(())
    }

    pub fn surface(&self) -> Result<&SurfaceSpec> {
        self.surface.as_ref().ok_or_else(|| Error::Config("this command needs a `[surface]` table".into()))
    }

    /// SHA-256 of the canonical JSON form, lowercase hex.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("scenario serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn scalar(text: &str) -> toml::Value {
    if let Ok(i) = text.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = text.parse::<f64>() {
        toml::Value::Float(f)
    } else if let Ok(b) = text.parse::<bool>() {
        toml::Value::Boolean(b)
    } else {
        toml::Value::String(text.to_string())
    }
}

/// `"sphere n=2 radius=1.5"` → surface spec, with the same strict checks as
/// the config file. `r` is accepted for `radius`.
pub fn parse_surface(text: &str) -> Result<SurfaceSpec> {
    let mut words = text.split_whitespace();
    let kind = words.next().ok_or_else(|| Error::Config("empty surface description".into()))?;
    let mut table = toml::Table::new();
    table.insert("kind".into(), toml::Value::String(kind.to_string()));
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got `{w}`")))?;
        let k = if k == "r" { "radius" } else { k };
        table.insert(k.to_string(), scalar(v));
    }
    let spec: SurfaceSpec = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

/// `["n=2", "r=1.0:2.0:0.05"]` → sweep. `n` takes a comma list, `r` a
/// `start:end:step` range or a single value.
pub fn parse_sweep(tokens: &[String]) -> Result<SweepParams> {
    let mut out = SweepParams::default();
    for t in tokens {
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value in sweep, got `{t}`")))?;
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| Error::Config(format!("sweep `{t}`: {e}")));
        match k {
            "n" => {
                out.dims = v
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|e| Error::Config(format!("sweep `{t}`: {e}"))))
                    .collect::<Result<_>>()?
            }
            "r" => match v.split(':').collect::<Vec<_>>()[..] {
                [a, b, c] => {
                    out.r_min = num(a)?;
                    out.r_max = num(b)?;
                    out.r_step = num(c)?;
                }
                [a] => {
                    out.r_min = num(a)?;
                    out.r_max = out.r_min;
                }
                _ => return Err(Error::Config(format!("sweep `{t}`: use start:end:step or a single value"))),
            },
            other => return Err(Error::Config(format!("unknown sweep key `{other}`"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(Scenario::from_toml("resolutoin = 12\n"), Err(Error::Config(_))));
        let e = Scenario::from_toml("[surface]\nkind = \"sphere\"\nn = 2\nradius = 1.0\ncolor = 3\n").unwrap_err();
        assert!(e.to_string().contains("color"), "{e}");
        assert!(Scenario::from_toml("[flow]\nstep = 0.1\n").is_err());
    }

    #[test]
    fn bounds_enforced() {
        assert!(Scenario::from_toml("resolution = 4\n").is_err());
        assert!(Scenario::from_toml("[surface]\nkind = \"cylinder\"\nn = 2\nk = 3\nradius = 1.0\n").is_err());
        assert!(Scenario::from_toml("[flow]\ndt = -1.0\n").is_err());
        assert!(Scenario::from_toml("tolerance = 2.0\n").is_err());
    }

    #[test]
    fn surface_flag_syntax() {
        assert_eq!(parse_surface("sphere n=2 r=1.5").unwrap(), SurfaceSpec::Sphere { n: 2, radius: 1.5 });
        assert_eq!(parse_surface("sphere n=2 radius=2").unwrap(), SurfaceSpec::Sphere { n: 2, radius: 2.0 });
        assert!(parse_surface("sphere n=2").is_err());
        assert!(parse_surface("torus n=2 r=1").is_err());
        assert!(parse_surface("sphere n=2 r=1 q=3").is_err());
    }

    #[test]
    fn sweep_syntax() {
        let s = parse_sweep(&["n=2".into(), "r=1.0:2.0:0.05".into()]).unwrap();
        assert_eq!(s.dims, vec![2]);
        let r = s.radii();
        assert_eq!(r.len(), 21);
        assert_eq!(r[8], 1.4);
        assert_eq!(r[20], 2.0);
        assert!(parse_sweep(&["m=2".into()]).is_err());
        assert!(parse_sweep(&["r=1:2".into()]).is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = Scenario::default();
        let mut b = Scenario::default();
        assert_eq!(a.hash(), b.hash());
        b.resolution = 25;
        assert_ne!(a.hash(), b.hash());
    }
}
