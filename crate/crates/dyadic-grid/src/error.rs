use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("ancestor out of range: level {level} minus {k} is below the root")]
    AncestorOutOfRange { level: u32, k: u32 },

    #[error("shift stream too short: need {needed} levels, stream has {available}")]
    InsufficientShiftDepth { needed: u32, available: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cube index {index} out of range at level {level}")]
    IndexOutOfRange { index: u64, level: u32 },

    #[error("invalid good/bad parameters: {reason}")]
    InvalidParams { reason: String },

    #[error("malformed shift stream text: {reason}")]
    MalformedStream { reason: String },
}
