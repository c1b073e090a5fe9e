use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    Arity { left: usize, right: usize },

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("invalid field descriptor: {0}")]
    InvalidField(String),

    #[error("elements belong to different fields: {0} vs {1}")]
    DescriptorMismatch(String, String),

    #[error("inverse of zero")]
    DivisionByZero,

    #[error("level must be a finite non-negative integer, got {0}")]
    InvalidLevel(String),

    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("cannot project from level {from} up to level {to}")]
    ProjectUpward { from: u32, to: u32 },

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("hensel lifting: {0}")]
    Hensel(String),

    #[error("iterated sums need at least two summands, got {0}")]
    TooFewSummands(usize),

    #[error("element indistinguishable from zero within {0} probe levels")]
    ProbeBoundReached(u32),

    #[error("contract violation at level {level}: {reason}")]
    ContractViolation { level: u32, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
