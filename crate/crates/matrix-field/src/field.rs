use std::sync::Arc;

use num_complex::Complex64;

use crate::cmat::{self, CMatrix};
use crate::error::FieldError;
use crate::grid::GridSpec;
use crate::Result;

/// A piecewise-constant `d x d` matrix-valued function on the torus, one
/// matrix per finest-level cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: Arc<GridSpec>,
    d: usize,
    values: Vec<CMatrix>,
}

impl MatrixField {
    pub fn from_cells(grid: Arc<GridSpec>, d: usize, values: Vec<CMatrix>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(FieldError::ShapeMismatch {
                reason: format!(
                    "expected {} cells, got {}",
                    grid.cells(),
                    values.len()
                ),
            });
        }
        if values.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(FieldError::ShapeMismatch {
                reason: format!("all cells must hold {d} x {d} matrices"),
            });
        }
        Ok(MatrixField { grid, d, values })
    }

    pub fn zero(grid: Arc<GridSpec>, d: usize) -> Self {
        let values = vec![cmat::zeros(d); grid.cells()];
        MatrixField { grid, d, values }
    }

    pub fn constant(grid: Arc<GridSpec>, m: CMatrix) -> Self {
        let d = m.nrows();
        assert_eq!(m.ncols(), d, "constant field needs a square matrix");
        let values = vec![m; grid.cells()];
        MatrixField { grid, d, values }
    }

    pub fn constant_identity(grid: Arc<GridSpec>, d: usize) -> Self {
        Self::constant(grid, cmat::identity(d))
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn levels(&self) -> u32 {
        self.grid.levels()
    }

    pub fn cell(&self, i: usize) -> &CMatrix {
        &self.values[i]
    }

    pub fn cells(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn cell_mut(&mut self, i: usize) -> &mut CMatrix {
        &mut self.values[i]
    }

    /// Cell volume `2^(-levels*dim)`.
    pub fn cell_volume(&self) -> f64 {
        1.0 / self.grid.cells() as f64
    }

    /// Rebind to another grid of the same shape (cell data unchanged).
    pub fn with_grid(&self, grid: Arc<GridSpec>) -> Result<Self> {
        if !self.grid.same_shape(&grid) {
            return Err(FieldError::ShapeMismatch {
                reason: "grids differ in dimension or resolution".into(),
            });
        }
        Ok(MatrixField {
            grid,
            d: self.d,
            values: self.values.clone(),
        })
    }

    pub fn check_same_shape(&self, other: &MatrixField) -> Result<()> {
        if !self.grid.same_shape(&other.grid) || self.d != other.d {
            return Err(FieldError::ShapeMismatch {
                reason: format!(
                    "fields differ: (dim {}, levels {}, d {}) vs (dim {}, levels {}, d {})",
                    self.dim(),
                    self.levels(),
                    self.d,
                    other.dim(),
                    other.levels(),
                    other.d
                ),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MatrixField) -> Result<MatrixField> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(MatrixField {
            grid: self.grid.clone(),
            d: self.d,
            values,
        })
    }

    pub fn sub(&self, other: &MatrixField) -> Result<MatrixField> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(MatrixField {
            grid: self.grid.clone(),
            d: self.d,
            values,
        })
    }

    pub fn scale(&self, lambda: Complex64) -> MatrixField {
        let values = self.values.iter().map(|a| a * lambda).collect();
        MatrixField {
            grid: self.grid.clone(),
            d: self.d,
            values,
        }
    }

    /// Pointwise matrix product `(self * other)(x) = self(x) other(x)`.
    pub fn mul(&self, other: &MatrixField) -> Result<MatrixField> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(MatrixField {
            grid: self.grid.clone(),
            d: self.d,
            values,
        })
    }

    /// Pointwise adjoint `f*`.
    pub fn adjoint(&self) -> MatrixField {
        let values = self.values.iter().map(CMatrix::adjoint).collect();
        MatrixField {
            grid: self.grid.clone(),
            d: self.d,
            values,
        }
    }

    /// Cube averages at every level, `out[j][cube]`, finest last.
    pub fn cube_averages(&self) -> Vec<Vec<CMatrix>> {
        let levels = self.levels();
        let corners = self.grid.corners();
        let mut out: Vec<Vec<CMatrix>> = Vec::with_capacity(levels as usize + 1);
        out.push(self.values.clone());
        for j in (0..levels).rev() {
            let finer = &out[out.len() - 1];
            let scale = Complex64::new(1.0 / corners as f64, 0.0);
            let avgs: Vec<CMatrix> = (0..self.grid.cubes_at(j))
                .map(|q| {
                    let mut acc = cmat::zeros(self.d);
                    for t in 0..corners {
                        acc += &finer[self.grid.child(j, q, t)];
                    }
                    acc * scale
                })
                .collect();
            out.push(avgs);
        }
        out.reverse();
        out
    }

    fn expand(&self, level: u32, per_cube: &[CMatrix]) -> MatrixField {
        let values = (0..self.grid.cells())
            .map(|cell| per_cube[self.grid.cube_of_cell(level, cell)].clone())
            .collect();
        MatrixField {
            grid: self.grid.clone(),
            d: self.d,
            values,
        }
    }

    /// Conditional expectation onto level-`k` measurable fields.
    pub fn cond_expect(&self, k: u32) -> Result<MatrixField> {
        let levels = self.levels();
        if k > levels {
            return Err(FieldError::LevelOutOfRange { level: k, max: levels });
        }
        if k == levels {
            return Ok(self.clone());
        }
        let avgs = self.cube_averages();
        Ok(self.expand(k, &avgs[k as usize]))
    }

    /// Martingale difference `D_k = E_k - E_(k-1)`, `1 <= k <= levels`.
    pub fn mart_diff(&self, k: u32) -> Result<MatrixField> {
        let levels = self.levels();
        if k == 0 || k > levels {
            return Err(FieldError::LevelOutOfRange { level: k, max: levels });
        }
        let avgs = self.cube_averages();
        let ek = self.expand(k, &avgs[k as usize]);
        let ekm1 = self.expand(k - 1, &avgs[k as usize - 1]);
        ek.sub(&ekm1)
    }

    /// All martingale differences `D_1..D_levels` from a single pyramid.
    pub fn martingale_diffs(&self) -> Vec<MatrixField> {
        let levels = self.levels();
        let avgs = self.cube_averages();
        let mut expanded: Vec<MatrixField> = (0..=levels)
            .map(|k| {
                if k == levels {
                    self.clone()
                } else {
                    self.expand(k, &avgs[k as usize])
                }
            })
            .collect();
        let mut diffs = Vec::with_capacity(levels as usize);
        for k in 1..=levels as usize {
            let hi = expanded[k].clone();
            let lo = &expanded[k - 1];
            diffs.push(hi.sub(lo).expect("shapes match"));
        }
        expanded.clear();
        diffs
    }

    /// `<<g, f>> = int tr(g(x)* f(x)) dx`, anti-linear in `self`.
    pub fn pairing(&self, f: &MatrixField) -> Result<Complex64> {
        self.check_same_shape(f)?;
        let mut acc = Complex64::ZERO;
        for (g_c, f_c) in self.values.iter().zip(&f.values) {
            acc += cmat::hs_inner(g_c, f_c);
        }
        Ok(acc * Complex64::new(self.cell_volume(), 0.0))
    }

    /// `L2` norm, `sqrt(<<f, f>>)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(cmat::hs_norm_sq).sum();
        (s * self.cell_volume()).sqrt()
    }

    /// Largest pointwise entry difference against another field.
    pub fn max_abs_diff(&self, other: &MatrixField) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| cmat::max_abs_diff(a, b))
            .fold(0.0, f64::max))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.values
            .iter()
            .map(cmat::max_abs_entry)
            .fold(0.0, f64::max)
    }

    /// Whether the field is constant on every level-`k` cube (exactly).
    pub fn is_level_measurable(&self, k: u32) -> bool {
        if k >= self.levels() {
            return true;
        }
        (0..self.grid.cubes_at(k)).all(|q| {
            let cells = self.grid.cells_of_cube(k, q);
            cells
                .iter()
                .all(|&c| self.values[c] == self.values[cells[0]])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;

    fn scalar_field(grid: &Arc<GridSpec>, vals: &[f64]) -> MatrixField {
        let cells = vals
            .iter()
            .map(|&v| CMatrix::from_element(1, 1, Complex64::new(v, 0.0)))
            .collect();
        MatrixField::from_cells(grid.clone(), 1, cells).unwrap()
    }

    #[test]
    fn averaging_to_the_root() {
        let grid = GridSpec::standard(1, 1);
        let f = scalar_field(&grid, &[1.0, 3.0]);
        let e0 = f.cond_expect(0).unwrap();
        assert_eq!(e0.cell(0)[(0, 0)].re, 2.0);
        assert_eq!(e0.cell(1)[(0, 0)].re, 2.0);
    }

    #[test]
    fn cond_expect_is_idempotent_and_nested() {
        let grid = GridSpec::standard(2, 2);
        let f = random_field(&grid, 3, 7);
        for k in 0..=2 {
            let ek = f.cond_expect(k).unwrap();
            let ekk = ek.cond_expect(k).unwrap();
            assert!(ek.max_abs_diff(&ekk).unwrap() < 1e-13);
        }
        // E_j E_k = E_min(j,k)
        for j in 0..=2u32 {
            for k in 0..=2u32 {
                let a = f.cond_expect(k).unwrap().cond_expect(j).unwrap();
                let b = f.cond_expect(j.min(k)).unwrap();
                assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn telescoping_to_identity() {
        let grid = GridSpec::standard(1, 5);
        let f = random_field(&grid, 4, 21);
        let mut acc = f.cond_expect(0).unwrap();
        for k in 1..=5 {
            acc = acc.add(&f.mart_diff(k).unwrap()).unwrap();
        }
        assert!(acc.max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn pure_first_level_oscillation() {
        // f = h_[0,1): D_1 f = f and all deeper differences vanish.
        let grid = GridSpec::standard(1, 4);
        let f = crate::haar::haar_basis_field(&grid, 2, 0, 0, crate::haar::HaarSignature(1))
            .unwrap();
        assert!(f.mart_diff(1).unwrap().max_abs_diff(&f).unwrap() < 1e-14);
        for k in 2..=4 {
            assert!(f.mart_diff(k).unwrap().max_abs_entry() < 1e-14);
        }
    }

    #[test]
    fn constant_field_has_zero_differences() {
        let grid = GridSpec::standard(1, 3);
        let f = MatrixField::constant_identity(grid, 2);
        for k in 1..=3 {
            assert!(f.mart_diff(k).unwrap().max_abs_entry() < 1e-15);
        }
    }

    #[test]
    fn martingale_orthogonality_under_pairing() {
        let grid = GridSpec::standard(1, 4);
        let f = random_field(&grid, 2, 5);
        let g = random_field(&grid, 2, 6);
        for j in 1..=4u32 {
            for k in 1..=4u32 {
                if j != k {
                    let p = f
                        .mart_diff(j)
                        .unwrap()
                        .pairing(&g.mart_diff(k).unwrap())
                        .unwrap();
                    assert!(p.norm() < 1e-12, "levels {j},{k}: {p}");
                }
            }
        }
    }

    #[test]
    fn pairing_is_positive_on_diagonal() {
        let grid = GridSpec::standard(2, 2);
        let f = random_field(&grid, 3, 11);
        let p = f.pairing(&f).unwrap();
        assert!(p.im.abs() < 1e-12);
        assert!(p.re > 0.0);
        assert!((p.re.sqrt() - f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn conditional_expectation_is_self_adjoint_and_modular() {
        let grid = GridSpec::standard(1, 4);
        let f = random_field(&grid, 3, 1);
        let g = random_field(&grid, 3, 2);
        for k in 0..=4 {
            let a = g.cond_expect(k).unwrap().pairing(&f).unwrap();
            let b = g.pairing(&f.cond_expect(k).unwrap()).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
        // E_k(u f) = u E_k(f) for constant u.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let u = MatrixField::constant(grid.clone(), crate::cmat::random_gaussian(3, &mut rng));
        let lhs = u.mul(&f).unwrap().cond_expect(2).unwrap();
        let rhs = u.mul(&f.cond_expect(2).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn level_out_of_range_errors() {
        let grid = GridSpec::standard(1, 2);
        let f = random_field(&grid, 1, 9);
        assert!(matches!(
            f.cond_expect(3),
            Err(FieldError::LevelOutOfRange { .. })
        ));
        assert!(matches!(
            f.mart_diff(0),
            Err(FieldError::LevelOutOfRange { .. })
        ));
    }
}
