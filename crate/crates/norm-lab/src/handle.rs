//! Type-erased linear operators on matrix fields.

use std::sync::Arc;

use num_complex::Complex64;

use dyadic_operators::{FieldOperator, OperatorError};
use matrix_field::random::random_field;
use matrix_field::{GridSpec, MatrixField};

use crate::Result;

type ApplyFn =
    Arc<dyn Fn(&MatrixField) -> std::result::Result<MatrixField, OperatorError> + Send + Sync>;

/// An abstract linear map on matrix fields with its domain descriptor.
#[derive(Clone)]
pub struct LinearOperatorHandle {
    grid: Arc<GridSpec>,
    d: usize,
    apply: ApplyFn,
    adjoint: ApplyFn,
}

impl LinearOperatorHandle {
    pub fn new(grid: Arc<GridSpec>, d: usize, apply: ApplyFn, adjoint: ApplyFn) -> Self {
        LinearOperatorHandle {
            grid,
            d,
            apply,
            adjoint,
        }
    }

    pub fn from_operator<T>(op: T, grid: Arc<GridSpec>, d: usize) -> Self
    where
        T: FieldOperator + Send + Sync + 'static,
    {
        let op = Arc::new(op);
        let op2 = op.clone();
        LinearOperatorHandle {
            grid,
            d,
            apply: Arc::new(move |f| op.apply(f)),
            adjoint: Arc::new(move |f| op2.apply_adjoint(f)),
        }
    }

    /// The identity map on the given shape.
    pub fn identity(grid: Arc<GridSpec>, d: usize) -> Self {
        LinearOperatorHandle {
            grid,
            d,
            apply: Arc::new(|f| Ok(f.clone())),
            adjoint: Arc::new(|f| Ok(f.clone())),
        }
    }

    /// The scaled operator `lambda T`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let apply = self.apply.clone();
        let adjoint = self.adjoint.clone();
        let conj = lambda.conj();
        LinearOperatorHandle {
            grid: self.grid.clone(),
            d: self.d,
            apply: Arc::new(move |f| apply(f).map(|g| g.scale(lambda))),
            adjoint: Arc::new(move |f| adjoint(f).map(|g| g.scale(conj))),
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Complex dimension of the domain, `2^(levels*dim) * d^2`.
    pub fn dimension(&self) -> usize {
        self.grid.cells() * self.d * self.d
    }

    pub fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        Ok((self.apply)(f)?)
    }

    pub fn apply_adjoint(&self, f: &MatrixField) -> Result<MatrixField> {
        Ok((self.adjoint)(f)?)
    }

    /// Residual of a randomized linearity probe, relative to the probe scale.
    pub fn linearity_probe(&self, seed: u64) -> Result<f64> {
        let f = random_field(&self.grid, self.d, dyadic_grid::seeding::named(seed, "lin-f"));
        let g = random_field(&self.grid, self.d, dyadic_grid::seeding::named(seed, "lin-g"));
        let alpha = Complex64::new(0.75, -0.5);
        let lhs = self.apply(&f.scale(alpha).add(&g)?)?;
        let rhs = self.apply(&f)?.scale(alpha).add(&self.apply(&g)?)?;
        let scale = lhs.l2_norm().max(1.0);
        Ok(lhs.sub(&rhs)?.l2_norm() / scale)
    }

    /// Residual of a randomized adjoint probe `<<g, Tf>> - <<T*g, f>>`.
    pub fn adjoint_probe(&self, seed: u64) -> Result<f64> {
        let f = random_field(&self.grid, self.d, dyadic_grid::seeding::named(seed, "adj-f"));
        let g = random_field(&self.grid, self.d, dyadic_grid::seeding::named(seed, "adj-g"));
        let lhs = g.pairing(&self.apply(&f)?)?;
        let rhs = self.apply_adjoint(&g)?.pairing(&f)?;
        Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
    }
}
