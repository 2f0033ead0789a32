use thiserror::Error;

pub type Result<T> = std::result::Result<T, SolitonError>;

#[derive(Debug, Error)]
pub enum SolitonError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("existence condition violated: {0}")]
    ConditionViolated(String),

    #[error(
        "adaptive integrator step underflow at r = {r:.6e} (shoot parameter {shoot_param:.6e})"
    )]
    StepFailure { r: f64, shoot_param: f64 },

    #[error("no undershoot/overshoot bracket found for omega = {omega}, n = {n}, k = {k}")]
    NoBracket { omega: f64, n: usize, k: u32 },

    #[error("converged profile has {nodes} node(s), expected none")]
    NodeCountMismatch { nodes: usize },

    #[error("profile has no fitted exponential tail")]
    TailNotCertified,

    #[error("velocity magnitude {speed} is not below the speed of light")]
    SuperluminalVelocity { speed: f64 },

    #[error("grid too small for velocity {velocity:?}: boundary/peak ratio {ratio:.3e} exceeds {limit:.0e}")]
    GridTooSmall {
        velocity: Vec<f64>,
        ratio: f64,
        limit: f64,
    },

    #[error("time step {dt} exceeds CFL bound {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("field left the finite range at t = {time}")]
    NonFinite { time: f64 },

    #[error("total energy below {threshold:e}; center of energy undefined")]
    ZeroField { threshold: f64 },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
