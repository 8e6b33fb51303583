//! The dyadic operator zoo as exact linear maps on [`MatrixField`].
//!
//! Everything acts through Haar coefficients or level sums on the finite
//! torus filtration; bi-infinite sums of the continuous theory become sums
//! over levels `1..=L` plus explicit coarse terms, so every identity is
//! checkable to rounding error.

pub mod error;
pub mod figiel;
pub mod io;
pub mod paraproduct;
pub mod perfect;
pub mod random;
pub mod shift_op;
pub mod tensor;
pub mod transform;

pub use error::OperatorError;
pub use figiel::{figiel_terms, CompatibilityPartition, FigielReport};
pub use io::DyadicOperatorSpec;
pub use paraproduct::{
    haar_multiplier, paraproduct, paraproduct_adjoint, r_operator, r_operator_coefficient_form,
};
pub use perfect::PerfectDyadicCZO;
pub use shift_op::{commutator, commutator_audit_residual, commutator_formula, DyadicShift};
pub use tensor::{HaarIndex, HaarTensorOperator};
pub use transform::{mart_transform, MartingaleTransform};

use matrix_field::MatrixField;

pub type Result<T> = std::result::Result<T, OperatorError>;

/// A linear operator on matrix fields with a computable adjoint.
///
/// All implementors are right-module maps: they commute with right
/// multiplication by constant matrices.
pub trait FieldOperator: Sync {
    fn apply(&self, f: &MatrixField) -> Result<MatrixField>;
    fn apply_adjoint(&self, f: &MatrixField) -> Result<MatrixField>;
}
