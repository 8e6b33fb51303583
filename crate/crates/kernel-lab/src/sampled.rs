//! Uniformly sampled real functions on an interval, the representation used
//! by the kernel experiments.

use std::sync::Arc;

use matrix_field::cmat::CMatrix;
use matrix_field::{GridSpec, MatrixField};
use num_complex::Complex64;

use crate::error::KernelError;
use crate::Result;

/// A real function sampled at cell midpoints of a uniform grid over
/// `[left, left + len)`, treated as piecewise constant on the cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub left: f64,
    pub len: f64,
    pub samples: Vec<f64>,
}

impl SampledFunction {
    pub fn from_fn(left: f64, len: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = len / n as f64;
        let samples = (0..n)
            .map(|i| f(left + (i as f64 + 0.5) * h))
            .collect();
        SampledFunction { left, len, samples }
    }

    pub fn zero(left: f64, len: f64, n: usize) -> Self {
        SampledFunction {
            left,
            len,
            samples: vec![0.0; n],
        }
    }

    /// A smooth compactly supported bump centered at `center` with support
    /// radius `radius`: `exp(1 - 1/(1-u^2))` inside, zero outside.
    pub fn bump(left: f64, len: f64, n: usize, center: f64, radius: f64) -> Self {
        Self::from_fn(left, len, n, |x| {
            let u = (x - center) / radius;
            if u.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - u * u)).exp()
            } else {
                0.0
            }
        })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn cell_width(&self) -> f64 {
        self.len / self.n() as f64
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.cell_width()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.cell_width()).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.cell_width()
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        if self.n() != other.n() || self.left != other.left || self.len != other.len {
            return Err(KernelError::InvalidInput {
                reason: "sampled functions live on different grids".into(),
            });
        }
        Ok(SampledFunction {
            left: self.left,
            len: self.len,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> SampledFunction {
        SampledFunction {
            left: self.left,
            len: self.len,
            samples: self.samples.iter().map(|v| c * v).collect(),
        }
    }

    /// Projection onto the dyadic piecewise-constant space: the samples
    /// become the cells of a scalar matrix field on the unit torus. Requires
    /// the box to be `[0, 1)` and a power-of-two sample count.
    pub fn to_unit_torus_field(&self) -> Result<MatrixField> {
        if self.left != 0.0 || self.len != 1.0 {
            return Err(KernelError::InvalidInput {
                reason: "dyadic projection expects the unit box [0, 1)".into(),
            });
        }
        let n = self.n();
        if !n.is_power_of_two() {
            return Err(KernelError::InvalidInput {
                reason: format!("sample count {n} is not a power of two"),
            });
        }
        let levels = n.trailing_zeros();
        let grid = GridSpec::standard(1, levels);
        let cells = self
            .samples
            .iter()
            .map(|&v| CMatrix::from_element(1, 1, Complex64::new(v, 0.0)))
            .collect();
        Ok(MatrixField::from_cells(grid, 1, cells)?)
    }

    /// Inverse of [`Self::to_unit_torus_field`] for scalar fields.
    pub fn from_unit_torus_field(f: &MatrixField) -> Result<SampledFunction> {
        if f.dim() != 1 || f.d() != 1 {
            return Err(KernelError::InvalidInput {
                reason: "expected a scalar field on the 1-torus".into(),
            });
        }
        Ok(SampledFunction {
            left: 0.0,
            len: 1.0,
            samples: f.cells().iter().map(|m| m[(0, 0)].re).collect(),
        })
    }
}

/// Reusable handle for grids of the unit torus at the sampled resolution.
pub fn unit_grid_for(n: usize) -> Result<Arc<GridSpec>> {
    if !n.is_power_of_two() {
        return Err(KernelError::InvalidInput {
            reason: format!("sample count {n} is not a power of two"),
        });
    }
    Ok(GridSpec::standard(1, n.trailing_zeros()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_supported_and_smooth() {
        let f = SampledFunction::bump(0.0, 1.0, 512, 0.5, 0.125);
        assert_eq!(f.n(), 512);
        assert!(f.samples[0] == 0.0 && f.samples[511] == 0.0);
        assert!(f.samples[256] > 0.9);
        assert!(f.l2_norm() > 0.0);
    }

    #[test]
    fn torus_projection_round_trip() {
        let f = SampledFunction::bump(0.0, 1.0, 64, 0.4, 0.2);
        let field = f.to_unit_torus_field().unwrap();
        let back = SampledFunction::from_unit_torus_field(&field).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn non_power_of_two_rejected() {
        let f = SampledFunction::zero(0.0, 1.0, 100);
        assert!(f.to_unit_torus_field().is_err());
    }
}
