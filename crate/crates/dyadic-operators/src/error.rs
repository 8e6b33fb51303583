use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("shape mismatch: {reason}")]
    ShapeMismatch { reason: String },

    #[error("coefficient sequence not adapted: xi_{index} is not level-{index} measurable")]
    NotAdapted { index: u32 },

    #[error("tensor entry out of range: {reason}")]
    EntryOutOfRange { reason: String },

    #[error(transparent)]
    Field(#[from] matrix_field::FieldError),

    #[error(transparent)]
    Grid(#[from] dyadic_grid::GridError),

    #[error("serialization error: {reason}")]
    Serialization { reason: String },
}
