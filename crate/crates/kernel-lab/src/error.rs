use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("supports touch the diagonal (m = {m}) and no principal-value rule was selected")]
    SingularOverlap { m: i64 },

    #[error("need at least {need} points for the fit, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("quadrature did not stabilize under refinement: errors {first} -> {second}")]
    QuadratureFailure { first: f64, second: f64 },

    #[error("invalid input: {reason}")]
    InvalidInput { reason: String },

    #[error(transparent)]
    Field(#[from] matrix_field::FieldError),

    #[error(transparent)]
    Operator(#[from] dyadic_operators::OperatorError),
}
