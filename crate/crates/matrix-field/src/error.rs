use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("level {level} out of range (filtration has levels 0..={max})")]
    LevelOutOfRange { level: u32, max: u32 },

    #[error("shape mismatch: {reason}")]
    ShapeMismatch { reason: String },

    #[error("coefficient layout mismatch: {reason}")]
    LayoutMismatch { reason: String },

    #[error("invalid exponent p = {p}; need p >= 1")]
    InvalidExponent { p: f64 },

    #[error("matrix square has eigenvalue {value} below the PSD clip tolerance")]
    PsdClipFailure { value: f64 },

    #[error("grid error: {0}")]
    Grid(#[from] dyadic_grid::GridError),

    #[error("serialization error: {reason}")]
    Serialization { reason: String },
}
