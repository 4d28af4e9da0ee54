use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ensemble parameters: {0}")]
    InvalidParams(String),

    #[error("no graph satisfying the constraints after {restarts} restarts: {reason}")]
    ConstraintUnsatisfiable { restarts: usize, reason: String },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    /// The bisection interval does not contain a success/failure transition.
    #[error("threshold not bracketed: decoding {} on the whole interval", if *.always_converges { "always succeeds" } else { "never succeeds" })]
    NonBracketing { always_converges: bool },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("search exhausted: {0}")]
    NotFound(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
