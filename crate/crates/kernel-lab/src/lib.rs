//! Model continuous kernels and the experiments tying them to the dyadic
//! machinery: Haar coefficient decay, weak-boundedness audits, and the
//! random-grid shift average against the principal-value Hilbert transform.

pub mod coeffs;
pub mod error;
pub mod hilbert;
pub mod kernel;
pub mod quadrature;
pub mod sampled;
pub mod shift_avg;
pub mod wbp;

pub use coeffs::{decay_fit, haar_coeff_kernel, DecayFit};
pub use error::KernelError;
pub use hilbert::hilbert_transform_pc;
pub use kernel::{Interval, KernelModel};
pub use sampled::SampledFunction;
pub use shift_avg::{shift_average_hilbert, ShiftAverageReport};
pub use wbp::wbp_audit;

pub type Result<T> = std::result::Result<T, KernelError>;
