use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum HvError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid of {m} points per dimension aliases a degree-{n} field (need at least {required})")]
    Aliasing { m: usize, n: usize, required: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncation mismatch: expected n = {expected}, got n = {got}")]
    TruncationMismatch { expected: usize, got: usize },

    #[error("blow-up at t = {time}: L2 norm {norm}")]
    BlowUp {
        time: f64,
        norm: f64,
        /// (t, ‖ξ‖_{L2}) pairs recorded before the failure.
        history: Vec<(f64, f64)>,
    },

    #[error("acceptance gate failed: {0}")]
    GateFailed(String),

    #[error("missing or invalid config key `{key}`: {reason}")]
    ConfigKey { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HvError> = std::result::Result<T, E>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> HvError {
    HvError::InvalidArgument(msg.into())
}
