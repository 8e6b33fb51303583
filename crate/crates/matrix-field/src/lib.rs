//! Matrix-valued piecewise-constant functions on the n-torus.
//!
//! A [`MatrixField`] holds one `d x d` complex matrix per finest-level cell
//! and stands in for an element of `L_p` of the algebra of operator-valued
//! functions. All algebra is exact at this representation; Haar analysis,
//! conditional expectations and the norm functionals are computed from cell
//! sums, against either the standard dyadic system or a shifted one.

pub mod cmat;
pub mod error;
pub mod field;
pub mod grid;
pub mod haar;
pub mod io;
pub mod norms;
pub mod random;

pub use cmat::CMatrix;
pub use error::FieldError;
pub use field::MatrixField;
pub use grid::GridSpec;
pub use haar::{HaarCoefficients, HaarSignature};

pub type Result<T> = std::result::Result<T, FieldError>;
