//! Operator norms on the finite truncation of `L_2` and empirical norm
//! inequality suites.

pub mod envelopes;
pub mod error;
pub mod growth;
pub mod handle;
pub mod opnorm;
pub mod suite;

pub use error::NormLabError;
pub use growth::{paraproduct_growth, GrowthBudget, GrowthRow};
pub use handle::LinearOperatorHandle;
pub use opnorm::{op_norm, NormMethod, NormReport};
pub use suite::{ratio_suite, RatioStats};

pub type Result<T> = std::result::Result<T, NormLabError>;
