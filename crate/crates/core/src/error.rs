use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate simplex: volume {volume:e} is below the threshold {threshold:e}")]
    DegenerateSimplex { volume: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("permutation of order {order} applied to a point with {len} coordinates")]
    OrderMismatch { order: usize, len: usize },

    #[error("invalid barycentric point: {0}")]
    InvalidPoint(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("expression parse error at byte {position}: {message}")]
    ExpressionParse { position: usize, message: String },

    #[error("expression evaluation failed: {0}")]
    ExpressionEval(String),

    #[error("monomial of total degree {degree} exceeds the cap {cap}")]
    Overflow { degree: u32, cap: u32 },

    #[error("no exact integration rule applies to {0}")]
    NotExact(String),

    #[error(
        "convexity violation: cell lower bound {lower:e} exceeds its upper bound {upper:e}"
    )]
    ConvexityViolationDetected { lower: f64, upper: f64 },

    #[error("weight function is negative ({value:e}) at a sampled point")]
    NegativeWeight { value: f64 },

    #[error("serialization failed: {0}")]
    Serialization(String),

    #[error("no witness with Lg > {target:e} Rg found before a = 1 - 2^-{steps}")]
    SearchExhausted { target: f64, steps: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
