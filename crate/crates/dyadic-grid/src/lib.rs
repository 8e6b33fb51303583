//! Dyadic systems on the n-torus, with random shifts.
//!
//! Everything here is exact: cube positions are dyadic rationals represented
//! as integers at a fine resolution, distances are computed in integer
//! arithmetic, and the good/bad classification never touches floating point.
//!
//! The torus `(R/Z)^n` replaces the real line so that shifted grids stay
//! finite. A grid is determined by a [`ShiftStream`]: the level-`j` lattice
//! is the standard one translated by `sum_{i>j} 2^-i beta_i` per coordinate.

pub mod cube;
pub mod error;
pub mod goodbad;
pub mod seeding;
pub mod shift;

pub use cube::DyadicCube;
pub use error::GridError;
pub use goodbad::{
    estimate_pi_good, pi_good_exact_1d, verify_good_decoupling, DecouplingReport, GoodBadParams,
    PiGoodEstimate, ShiftSample,
};
pub use shift::ShiftStream;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GridError>;
