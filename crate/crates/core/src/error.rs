use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not strictly inside the {model} model: {condition}")]
    OutsideModel { model: &'static str, condition: String },

    #[error("pole of the fractional-linear map: {0}")]
    Pole(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("group element violates its invariant: {0}")]
    InvariantViolation(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),

    #[error("degenerate regression input: {0}")]
    Degenerate(String),

    #[error("kernel diagonal vanishes at the base point")]
    VanishingKernel,

    #[error("sandwich violated at k = {k}: {detail}")]
    SandwichViolation { k: u32, detail: String },
}
