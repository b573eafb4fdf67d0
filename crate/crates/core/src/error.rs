use thiserror::Error;

use crate::unitary::SetLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: d = {0} (need d >= 2)")]
    InvalidDimension(usize),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("degenerate unitary parameters: all components are zero")]
    DegenerateParameters,

    #[error("set {0:?} requires context that was not provided: {1}")]
    MissingContext(SetLabel, &'static str),

    #[error("sampling from set {set:?} exhausted after {rejects} rejections")]
    SamplingExhausted { set: SetLabel, rejects: usize },

    #[error("unsupported extremization: {0}")]
    Unsupported(String),

    #[error("invalid budget: {0}")]
    InvalidBudget(usize),

    #[error("eigenframe undefined: {0}")]
    FrameUndefined(String),

    #[error("degenerate circle: {0}")]
    DegenerateCircle(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("state is not generic: {0}")]
    NonGeneric(String),

    #[error("parameter out of domain: {0}")]
    OutOfDomain(String),

    #[error("numerical cross-check failed: {0}")]
    NumericalMismatch(String),
}
