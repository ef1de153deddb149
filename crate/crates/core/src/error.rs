use alloc::string::String;
use thiserror::Error;

/// Everything that can go wrong inside the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {coords:?} lies outside the chart domain")]
    OutsideDomain { coords: alloc::vec::Vec<f64> },
    #[error("jet order {requested} unsupported (chart provides up to {supported})")]
    OrderUnsupported { requested: usize, supported: usize },
    #[error("metric jet of order {have} is insufficient, need {need}")]
    InsufficientJetOrder { have: usize, need: usize },
    #[error("metric is not positive definite at the point")]
    NotPositiveDefinite,
    #[error("dimension {dim} is too low for {what}")]
    DimensionTooLow { dim: usize, what: &'static str },
    #[error("differencing step underflow near the chart boundary")]
    StepUnderflow,
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("soliton constant rho = {0} is not supported here")]
    RhoUnsupported(f64),
    #[error("conservation constant C0 vanishes; the structure cannot be normalized")]
    ZeroC0,
    #[error("integration failed after r = {last_r}: {reason}")]
    StepFailure { last_r: f64, reason: &'static str },
    #[error("radius {r} outside the profile range [{min}, {max}]")]
    RadiusOutsideProfile { r: f64, min: f64, max: f64 },
    #[error("rmax = {rmax} is too small for asymptotic fits (need at least {need})")]
    RmaxTooSmall { rmax: f64, need: f64 },
    #[error("scalar curvature is not strictly decreasing along the profile")]
    NonMonotoneScalar,
    #[error("profile is not normalized (R(0) = {0}, expected 1)")]
    NotNormalized(f64),
    #[error("operation is defined for steady profiles only")]
    SteadyOnly,
    #[error("|grad f| = {0} vanishes at the point (critical point of the potential)")]
    CriticalPoint(f64),
    #[error("level value {0} not found along any ray")]
    LevelNotFound(f64),
    #[error("operation needs a radial profile-backed structure")]
    NotProfileBacked,
}

pub type Result<T> = core::result::Result<T, Error>;
