use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: must be a prime congruent to 1 mod 4")]
    InvalidDiscriminant(i64),

    #[error("operands belong to different fields (D={left} vs D={right})")]
    ContextMismatch { left: u64, right: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divisor T({m}) is empty; log-derivative undefined")]
    EmptyDivisor { m: u64 },

    #[error("series has zero leading coefficient")]
    ZeroLeadingCoefficient,

    #[error("precision too small: need coefficients below q^{needed}, have q^{available}")]
    PrecisionTooSmall { needed: i64, available: i64 },

    #[error("obstructed principal part: pairings with cusp forms are {0:?}")]
    Obstructed(Vec<String>),

    #[error("sample point lies on a wall of S({m})")]
    SampleOnWall { m: u64 },

    #[error("principal part uses T({m}) which is not among the chamber supports")]
    SupportMismatch { m: u64 },

    #[error("trace bound {bound} does not reach the Weyl vector grade {needed}")]
    TraceBoundTooSmall { bound: String, needed: String },

    #[error("non-integer product exponent c~({n}) = {value}")]
    NonIntegerExponent { n: i64, value: String },

    #[error("plus-space violation at exponent {0}")]
    PlusSpaceViolation(i64),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("point lies on the divisor T({m})")]
    OnDivisor { m: u64 },

    #[error("numeric convergence failure: {0}")]
    Convergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
