use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate polyline segment at vertex {index}")]
    DegenerateSegment { index: usize },

    #[error("resolution {got} is below the minimum {min}")]
    ResolutionTooLow { got: usize, min: usize },

    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { got: usize, expected: usize },

    #[error("field lacks derivative data: {0}")]
    MissingDerivatives(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("variation is not weighted volume-preserving (∫ f w = {mean:e})")]
    NotVolumePreserving { mean: f64 },

    #[error("finite-difference step {eps:e} too small: roundoff {noise:e} dominates")]
    StepTooSmall { eps: f64, noise: f64 },

    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("alpha denominator {value:e} below floor {floor:e} at t = {t}")]
    DegenerateAlpha { value: f64, floor: f64, t: f64 },

    #[error("curve self-intersects at t = {t} (segments {first} and {second})")]
    SelfIntersection { t: f64, first: usize, second: usize },

    #[error("arclength budget {budget} exhausted before the curve returned to its starting axis")]
    ArclengthExhausted { budget: f64 },

    #[error("integrator step size underflow at arclength {s}")]
    StepUnderflow { s: f64 },

    #[error("no closed curve found: {0}")]
    NotFound(String),

    #[error("curve is not a verified λ-curve: {0}")]
    Unverified(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
