use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("energy level {0} outside the open interval (-4, 0)")]
    EnergyOutOfRange(f64),

    #[error("x = {x} outside the oval extent [{x1}, {x2}]")]
    OutsideOval { x: f64, x1: f64, x2: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, achieved {achieved:e}, requested {requested:e}")]
    Quadrature {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("singular system at h = {h}: |det| = {det:e}")]
    Singular { h: f64, det: f64 },

    #[error("series data only printed up to order {max}, requested {requested}")]
    SeriesOrder { requested: usize, max: usize },

    #[error("degenerate polynomial: {0}")]
    DegeneratePoly(String),

    #[error("polynomial parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown polynomial name `{0}`")]
    UnknownPoly(String),

    #[error("interval endpoint is a root after perturbation: {0}")]
    EndpointRoot(String),

    #[error("all perturbation parameters vanish; J is identically zero")]
    DegenerateParams,

    #[error("invalid targets: {0}")]
    InvalidTargets(String),

    #[error("three-zero construction failed verification ({found} zeros); try targets closer to -4")]
    WindowTooLarge { found: usize },

    #[error("orbit escaped from the triangle starting at t0 = {t0}")]
    Escape { t0: f64 },

    #[error("gauge failure: {0}")]
    Gauge(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
