use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("feature set must have count >= 1 and dim >= 1 (got {count}x{dim})")]
    EmptySet { count: usize, dim: usize },

    #[error("data length {len} does not match count*dim = {expected}")]
    ShapeMismatch { len: usize, expected: usize },

    #[error("dimension mismatch: {left} != {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),
}
