use thiserror::Error;

/// Errors raised by the set-valued calculus routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("a compact set must contain at least one point")]
    EmptySet,

    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("non-finite coordinate {0}")]
    NonFinite(f64),

    #[error("x = {x} lies outside the open domain ({a}, {b})")]
    Domain { x: f64, a: f64, b: f64 },

    #[error("anchor {0:?} is not a point of the sampled F(x0)")]
    UnknownAnchor(Vec<f64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown gallery entry `{0}`")]
    UnknownGallery(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("derivative field at x0 = {x0} did not converge")]
    Unconverged { x0: f64 },

    #[error("insufficient data: {usable} usable rungs, at least {needed} required")]
    InsufficientData { usable: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
