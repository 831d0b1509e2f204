use thiserror::Error;

use crate::value::Value;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval {lo}..{hi}: lower bound exceeds upper bound plus one")]
    InvalidInterval { lo: i64, hi: i64 },

    #[error("value {0} is outside the space")]
    ValueOutsideSpace(Value),

    #[error("relations are over different spaces")]
    SpaceMismatch,

    #[error("operation requires an extensional relation; materialize it first")]
    RequiresExtensional,

    #[error("space has {size} elements, above the limit of {limit}")]
    SpaceTooLarge { size: usize, limit: usize },

    #[error("space is not finitely enumerable")]
    Unbounded,

    #[error("image of {0} escapes the relation's target space")]
    ImageEscapesSpace(Value),

    #[error("relation is not Noetherian")]
    NotNoetherian,

    #[error("malformed expression: {0}")]
    MalformedExpr(String),

    #[error("unknown named function `{0}`")]
    UnknownNamedFunction(String),

    #[error("variant function is undefined on {0}")]
    NonTotalFunction(Value),

    #[error("variant function is negative on {0}")]
    NegativeVariantValue(Value),

    #[error("unknown postcondition oracle `{0}`")]
    UnknownOracle(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("input {0} is outside the initialization's input space")]
    InputOutsideSpace(Value),

    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: usize, partial: Vec<Value> },

    #[error("invalid loop: {0}")]
    Loop(#[from] crate::loopkit::LoopError),
}
