//! Perfect dyadic Calderon-Zygmund operators.
//!
//! A perfect dyadic CZO is determined by its Haar-diagonal transform entries
//! `xi^theta_I = <h^theta_I, T h^theta_I>` together with the two symbol
//! fields `b_col = T1` and `b_row = (T*1)*`; its action is the three-term
//! sum of the representation formula. The one-dimensional case is the
//! lemma's setting; for `n > 1` the diagonal-entry extension is used.

use matrix_field::haar::{haar_analyze, haar_synthesize, HaarCoefficients, HaarSignature};
use matrix_field::{GridSpec, MatrixField};

use crate::error::OperatorError;
use crate::paraproduct::{paraproduct, paraproduct_adjoint};
use crate::transform::MartingaleTransform;
use crate::{FieldOperator, Result};

#[derive(Debug, Clone)]
pub struct PerfectDyadicCZO {
    /// Transform entries per (cube, signature); the average slot is unused.
    xi: HaarCoefficients,
    /// `T1`.
    b_col: MatrixField,
    /// `(T*1)*`.
    b_row: MatrixField,
}

impl PerfectDyadicCZO {
    pub fn new(
        xi: HaarCoefficients,
        b_col: MatrixField,
        b_row: MatrixField,
    ) -> Result<Self> {
        b_col
            .check_same_shape(&b_row)
            .map_err(|e| OperatorError::ShapeMismatch {
                reason: e.to_string(),
            })?;
        xi.check_layout(b_col.grid(), b_col.d())
            .map_err(|e| OperatorError::ShapeMismatch {
                reason: e.to_string(),
            })?;
        Ok(PerfectDyadicCZO { xi, b_col, b_row })
    }

    pub fn grid(&self) -> &std::sync::Arc<GridSpec> {
        self.b_col.grid()
    }

    pub fn d(&self) -> usize {
        self.b_col.d()
    }

    pub fn xi(&self) -> &HaarCoefficients {
        &self.xi
    }

    pub fn b_col(&self) -> &MatrixField {
        &self.b_col
    }

    pub fn b_row(&self) -> &MatrixField {
        &self.b_row
    }

    /// Symmetric means `(T1)* = T*1`, i.e. `b_col = b_row` in our storage.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.b_col
            .max_abs_diff(&self.b_row)
            .map(|e| e <= tol)
            .unwrap_or(false)
    }

    /// The Haar-diagonal term `f -> sum_(I,theta) xi^theta_I <h^theta_I, f>
    /// h^theta_I` on its own.
    pub fn transform_term(&self, f: &MatrixField) -> Result<MatrixField> {
        let grid = f.grid().clone();
        let cf = haar_analyze(f);
        let mut out = HaarCoefficients::zero(grid.clone(), f.d());
        for j in 0..grid.levels() {
            for q in 0..grid.cubes_at(j) {
                for theta in HaarSignature::nonzero(grid.dim()) {
                    *out.coeff_mut(j, q, theta) =
                        self.xi.coeff(j, q, theta) * cf.coeff(j, q, theta);
                }
            }
        }
        Ok(haar_synthesize(&out)?)
    }

    /// The adapted multiplier fields `xi_k = sum_(I in D_k) <h_I, T h_I> 1_I`
    /// of the decomposition `T = M_xi + Lambda_(T1)` (one dimension only).
    pub fn transform_fields(&self) -> Result<MartingaleTransform> {
        let grid = self.grid().clone();
        if grid.dim() != 1 {
            return Err(OperatorError::ShapeMismatch {
                reason: "the martingale-transform decomposition is one-dimensional".into(),
            });
        }
        let theta = HaarSignature(1);
        let fields = (0..grid.levels())
            .map(|k| {
                let mut field = MatrixField::zero(grid.clone(), self.d());
                for q in 0..grid.cubes_at(k) {
                    let m = self.xi.coeff(k, q, theta);
                    for cell in grid.cells_of_cube(k, q) {
                        *field.cell_mut(cell) = m.clone();
                    }
                }
                field
            })
            .collect();
        Ok(MartingaleTransform::new(fields))
    }

    /// Adjoint operator: entries conjugated, symbol roles swapped.
    pub fn adjoint_operator(&self) -> PerfectDyadicCZO {
        let grid = self.grid().clone();
        let d = self.d();
        let mut xi = HaarCoefficients::zero(grid.clone(), d);
        for (j, q, theta, m) in self.xi.iter() {
            *xi.coeff_mut(j, q, theta) = m.adjoint();
        }
        PerfectDyadicCZO {
            xi,
            b_col: self.b_row.adjoint(),
            b_row: self.b_col.adjoint(),
        }
    }
}

/// The three-term action of a perfect dyadic CZO.
pub fn apply_perfect(t: &PerfectDyadicCZO, f: &MatrixField) -> Result<MatrixField> {
    f.check_same_shape(&t.b_col)
        .map_err(|e| OperatorError::ShapeMismatch {
            reason: e.to_string(),
        })?;
    let term1 = t.transform_term(f)?;
    let term2 = paraproduct_adjoint(&t.b_row, f)?;
    let term3 = paraproduct(&t.b_col, f)?;
    Ok(term1.add(&term2)?.add(&term3)?)
}

impl FieldOperator for PerfectDyadicCZO {
    fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        apply_perfect(self, f)
    }

    fn apply_adjoint(&self, f: &MatrixField) -> Result<MatrixField> {
        apply_perfect(&self.adjoint_operator(), f)
    }
}
