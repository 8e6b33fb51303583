//! General operators given by their Haar coefficient tensor
//! `<h^eta_J, T h^theta_I>` in the orthonormal basis (the constant function
//! plus all difference functions).

use std::collections::BTreeMap;
use std::sync::Arc;

use matrix_field::cmat::{self, CMatrix};
use matrix_field::haar::{haar_analyze, haar_synthesize, HaarCoefficients, HaarSignature};
use matrix_field::{GridSpec, MatrixField};

use crate::error::OperatorError;
use crate::{FieldOperator, Result};

/// Index of an orthonormal Haar basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HaarIndex {
    /// The constant function 1.
    Average,
    /// `h^theta` on the cube `cube` at `level` (cube levels `0..levels-1`).
    Diff {
        level: u32,
        cube: usize,
        theta: HaarSignature,
    },
}

/// Sparse operator in the Haar basis; entries multiply input coefficients
/// from the left.
#[derive(Debug, Clone)]
pub struct HaarTensorOperator {
    grid: Arc<GridSpec>,
    d: usize,
    entries: BTreeMap<(HaarIndex, HaarIndex), CMatrix>,
}

impl HaarTensorOperator {
    pub fn new(grid: Arc<GridSpec>, d: usize) -> Self {
        HaarTensorOperator {
            grid,
            d,
            entries: BTreeMap::new(),
        }
    }

    /// The identity operator as a tensor.
    pub fn identity(grid: Arc<GridSpec>, d: usize) -> Self {
        let mut t = Self::new(grid.clone(), d);
        t.entries
            .insert((HaarIndex::Average, HaarIndex::Average), cmat::identity(d));
        for j in 0..grid.levels() {
            for q in 0..grid.cubes_at(j) {
                for theta in HaarSignature::nonzero(grid.dim()) {
                    let ix = HaarIndex::Diff {
                        level: j,
                        cube: q,
                        theta,
                    };
                    t.entries.insert((ix, ix), cmat::identity(d));
                }
            }
        }
        t
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    fn check_index(&self, ix: HaarIndex) -> Result<()> {
        if let HaarIndex::Diff { level, cube, theta } = ix {
            let dim = self.grid.dim();
            if level >= self.grid.levels()
                || cube >= self.grid.cubes_at(level)
                || theta.is_zero()
                || theta.0 >= (1 << dim)
            {
                return Err(OperatorError::EntryOutOfRange {
                    reason: format!(
                        "index (level {level}, cube {cube}, theta {}) outside the realized \
                         basis (levels 0..{}, signatures 1..{})",
                        theta.0,
                        self.grid.levels(),
                        1 << dim
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn set_entry(&mut self, row: HaarIndex, col: HaarIndex, m: CMatrix) -> Result<()> {
        self.check_index(row)?;
        self.check_index(col)?;
        if m.nrows() != self.d || m.ncols() != self.d {
            return Err(OperatorError::ShapeMismatch {
                reason: format!("entry must be {0} x {0}", self.d),
            });
        }
        self.entries.insert((row, col), m);
        Ok(())
    }

    pub fn add_to_entry(&mut self, row: HaarIndex, col: HaarIndex, m: CMatrix) -> Result<()> {
        self.check_index(row)?;
        self.check_index(col)?;
        match self.entries.get_mut(&(row, col)) {
            Some(e) => {
                *e += m;
            }
            None => {
                self.set_entry(row, col, m)?;
            }
        }
        Ok(())
    }

    pub fn entry(&self, row: HaarIndex, col: HaarIndex) -> Option<&CMatrix> {
        self.entries.get(&(row, col))
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (&(HaarIndex, HaarIndex), &CMatrix)> {
        self.entries.iter()
    }

    /// Adjoint: swap row and column, conjugate-transpose each entry.
    pub fn adjoint_operator(&self) -> HaarTensorOperator {
        let entries = self
            .entries
            .iter()
            .map(|(&(r, c), m)| ((c, r), m.adjoint()))
            .collect();
        HaarTensorOperator {
            grid: self.grid.clone(),
            d: self.d,
            entries,
        }
    }

    /// Materialize any field operator as a tensor by applying it to every
    /// basis field and reading off coefficients above `drop_tol`.
    pub fn from_operator(
        op: &dyn FieldOperator,
        grid: &Arc<GridSpec>,
        d: usize,
        drop_tol: f64,
    ) -> Result<HaarTensorOperator> {
        let mut t = HaarTensorOperator::new(grid.clone(), d);
        let mut columns: Vec<HaarIndex> = vec![HaarIndex::Average];
        for j in 0..grid.levels() {
            for q in 0..grid.cubes_at(j) {
                for theta in HaarSignature::nonzero(grid.dim()) {
                    columns.push(HaarIndex::Diff {
                        level: j,
                        cube: q,
                        theta,
                    });
                }
            }
        }
        for col in columns {
            let basis = match col {
                HaarIndex::Average => MatrixField::constant_identity(grid.clone(), d),
                HaarIndex::Diff { level, cube, theta } => {
                    matrix_field::haar::haar_basis_field(grid, d, level, cube, theta)?
                }
            };
            let image = haar_analyze(&op.apply(&basis)?);
            if cmat::max_abs_entry(image.average()) > drop_tol {
                t.entries
                    .insert((HaarIndex::Average, col), image.average().clone());
            }
            for (j, q, theta, m) in image.iter() {
                if cmat::max_abs_entry(m) > drop_tol {
                    t.entries.insert(
                        (
                            HaarIndex::Diff {
                                level: j,
                                cube: q,
                                theta,
                            },
                            col,
                        ),
                        m.clone(),
                    );
                }
            }
        }
        Ok(t)
    }
}

impl FieldOperator for HaarTensorOperator {
    fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        if !self.grid.same_shape(f.grid()) || self.d != f.d() {
            return Err(OperatorError::ShapeMismatch {
                reason: "tensor and field live on different shapes".into(),
            });
        }
        let cf = haar_analyze(f);
        let mut out = HaarCoefficients::zero(f.grid().clone(), self.d);
        let mut out_avg = cmat::zeros(self.d);
        for ((row, col), m) in &self.entries {
            let input = match *col {
                HaarIndex::Average => cf.average(),
                HaarIndex::Diff { level, cube, theta } => cf.coeff(level, cube, theta),
            };
            let term = m * input;
            match *row {
                HaarIndex::Average => out_avg += term,
                HaarIndex::Diff { level, cube, theta } => {
                    *out.coeff_mut(level, cube, theta) += term;
                }
            }
        }
        out.set_average(out_avg);
        Ok(haar_synthesize(&out)?)
    }

    fn apply_adjoint(&self, f: &MatrixField) -> Result<MatrixField> {
        self.adjoint_operator().apply(f)
    }
}
