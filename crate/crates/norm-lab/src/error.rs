use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormLabError {
    #[error("dimension {dim} too large for the dense method (cap {cap})")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("degenerate input: {reason}")]
    DegenerateInput { reason: String },

    #[error(transparent)]
    Operator(#[from] dyadic_operators::OperatorError),

    #[error(transparent)]
    Field(#[from] matrix_field::FieldError),
}
