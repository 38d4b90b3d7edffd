use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid tree map: {0}")]
    InvalidMap(String),

    #[error("tree map domains do not match: {0}")]
    DomainMismatch(String),

    #[error("map does not have the required flavor: {0}")]
    FlavorViolation(String),

    #[error("elements are based on different trees")]
    MixedDomains,

    #[error("invalid parameter word: {0}")]
    InvalidWord(String),

    #[error("unknown family or element: {0}")]
    Unknown(String),

    #[error("operation undefined: {0}")]
    Undefined(String),

    #[error("no truncation iterate reaches a singleton")]
    NoSingletonTruncation,

    #[error("scale guard exceeded: {points} points at {colors} colors (cap {cap})")]
    ScaleExceeded {
        points: usize,
        colors: usize,
        cap: usize,
    },

    #[error("instance build guard: {0}")]
    BuildGuard(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
