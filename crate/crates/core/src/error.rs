use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("ODE integration failed at x = {x}: achieved tolerance {achieved:.3e}")]
    Integration { x: f64, achieved: f64 },

    #[error("root search failed: {0}")]
    RootSearch(String),

    #[error("value {value} outside domain: {what}")]
    Domain { value: f64, what: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigenvalue count mismatch in window {window}: expected {expected}, found {found}")]
    CountMismatch {
        window: String,
        expected: String,
        found: usize,
    },

    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
