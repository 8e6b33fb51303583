//! Operator-valued Haar analysis and synthesis.
//!
//! The Haar system on the torus consists of the constant function together
//! with, for every cube `I` at levels `0..levels-1` and every signature
//! `theta in {0,1}^n \ {0}`, the L2-normalized tensor function
//! `h^theta_I = prod_c h^(theta_c)_(I_c)`, where the oscillating profile is
//! positive on the lower (left) half. Coefficients are `d x d` matrices
//! `<h^theta_I, f> = int h^theta_I(x) f(x) dx`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::cmat::{self, CMatrix};
use crate::error::FieldError;
use crate::field::MatrixField;
use crate::grid::GridSpec;
use crate::Result;

/// A Haar signature: a bitmask over coordinates, bit `c` set when the factor
/// in coordinate `c` oscillates. Zero is the averaging signature and is
/// excluded from difference expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HaarSignature(pub u32);

impl HaarSignature {
    /// The distinguished signature with first coordinate oscillating only.
    pub fn theta_zero(dim: usize) -> HaarSignature {
        HaarSignature(1 << (dim - 1))
    }

    /// All nonzero signatures for `dim` coordinates.
    pub fn nonzero(dim: usize) -> impl Iterator<Item = HaarSignature> {
        (1u32..(1 << dim)).map(HaarSignature)
    }

    /// Sign of the signature on corner `t` (bitmask, bit set = upper half):
    /// product over oscillating coordinates of +1 on the lower half, -1 on
    /// the upper half.
    pub fn sign_on_corner(self, corner: usize) -> f64 {
        if (self.0 & corner as u32).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Haar coefficient data of a field: the coarse average plus one matrix per
/// (cube, nonzero signature).
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    grid: Arc<GridSpec>,
    d: usize,
    average: CMatrix,
    /// `levels[j][cube * (2^n - 1) + (theta - 1)]` for cubes at level `j`.
    levels: Vec<Vec<CMatrix>>,
}

impl HaarCoefficients {
    pub fn zero(grid: Arc<GridSpec>, d: usize) -> Self {
        let sigs = grid.corners() - 1;
        let levels = (0..grid.levels())
            .map(|j| vec![cmat::zeros(d); grid.cubes_at(j) * sigs])
            .collect();
        HaarCoefficients {
            grid,
            d,
            average: cmat::zeros(d),
            levels,
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn average(&self) -> &CMatrix {
        &self.average
    }

    pub fn set_average(&mut self, m: CMatrix) {
        self.average = m;
    }

    fn slot(&self, _level: u32, cube: usize, theta: HaarSignature) -> usize {
        let sigs = self.grid.corners() - 1;
        cube * sigs + (theta.0 as usize - 1)
    }

    pub fn coeff(&self, level: u32, cube: usize, theta: HaarSignature) -> &CMatrix {
        &self.levels[level as usize][self.slot(level, cube, theta)]
    }

    pub fn coeff_mut(
        &mut self,
        level: u32,
        cube: usize,
        theta: HaarSignature,
    ) -> &mut CMatrix {
        let s = self.slot(level, cube, theta);
        &mut self.levels[level as usize][s]
    }

    /// Total number of stored matrices including the average; equals the
    /// number of cells by completeness of the Haar basis.
    pub fn matrix_count(&self) -> usize {
        1 + self
            .levels
            .iter()
            .map(Vec::len)
            .sum::<usize>()
    }

    /// Iterate `(level, cube, theta, coefficient)` over all difference slots.
    pub fn iter(&self) -> impl Iterator<Item = (u32, usize, HaarSignature, &CMatrix)> {
        let sigs = self.grid.corners() - 1;
        self.levels.iter().enumerate().flat_map(move |(j, row)| {
            row.iter().enumerate().map(move |(s, m)| {
                (
                    j as u32,
                    s / sigs,
                    HaarSignature((s % sigs) as u32 + 1),
                    m,
                )
            })
        })
    }

    /// Sum of squared Hilbert-Schmidt norms of all difference coefficients.
    pub fn difference_energy(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|row| row.iter().map(cmat::hs_norm_sq))
            .sum()
    }

    pub fn check_layout(&self, grid: &GridSpec, d: usize) -> Result<()> {
        if !self.grid.same_shape(grid) || self.d != d {
            return Err(FieldError::LayoutMismatch {
                reason: format!(
                    "coefficients laid out for (dim {}, levels {}, d {}); \
                     requested (dim {}, levels {}, d {})",
                    self.grid.dim(),
                    self.grid.levels(),
                    self.d,
                    grid.dim(),
                    grid.levels(),
                    d
                ),
            });
        }
        Ok(())
    }
}

/// Analyze a field against the Haar system of its grid.
pub fn haar_analyze(f: &MatrixField) -> HaarCoefficients {
    let grid = f.grid().clone();
    let d = f.d();
    let corners = grid.corners();
    let avgs = f.cube_averages();
    let mut out = HaarCoefficients::zero(grid.clone(), d);
    for j in 0..grid.levels() {
        // <h^theta_I, f> = 2^(jn/2) * |child| * sum_t sign(theta, t) A_(j+1)(child_t)
        let factor = (grid.cubes_at(j) as f64).sqrt() / grid.cells() as f64
            * (grid.cubes_at(grid.levels()) / grid.cubes_at(j + 1)) as f64;
        for q in 0..grid.cubes_at(j) {
            for theta in HaarSignature::nonzero(grid.dim()) {
                let mut acc = cmat::zeros(d);
                for t in 0..corners {
                    let child = grid.child(j, q, t);
                    let sign = theta.sign_on_corner(t);
                    let term = &avgs[j as usize + 1][child] * Complex64::new(sign * factor, 0.0);
                    acc += term;
                }
                *out.coeff_mut(j, q, theta) = acc;
            }
        }
    }
    out.set_average(avgs[0][0].clone());
    out
}

/// Synthesize a field from Haar coefficients; exact left inverse of
/// [`haar_analyze`].
pub fn haar_synthesize(coeffs: &HaarCoefficients) -> Result<MatrixField> {
    let grid = coeffs.grid().clone();
    let d = coeffs.d();
    let corners = grid.corners();
    // Descend the pyramid: values on cubes of level j+1 from level j.
    let mut current = vec![coeffs.average().clone()];
    for j in 0..grid.levels() {
        // h^theta_I value on child t is 2^(jn/2) * sign(theta, t).
        let scale = (grid.cubes_at(j) as f64).sqrt();
        let mut next = vec![cmat::zeros(d); grid.cubes_at(j + 1)];
        for q in 0..grid.cubes_at(j) {
            for t in 0..corners {
                let mut v = current[q].clone();
                for theta in HaarSignature::nonzero(grid.dim()) {
                    let h_val = scale * theta.sign_on_corner(t);
                    v += coeffs.coeff(j, q, theta) * Complex64::new(h_val, 0.0);
                }
                next[grid.child(j, q, t)] = v;
            }
        }
        current = next;
    }
    MatrixField::from_cells(grid, d, current)
}

/// The scalar Haar function `h^theta_I` as a field (times the identity).
pub fn haar_basis_field(
    grid: &Arc<GridSpec>,
    d: usize,
    level: u32,
    cube: usize,
    theta: HaarSignature,
) -> Result<MatrixField> {
    if level >= grid.levels() && !theta.is_zero() {
        return Err(FieldError::LevelOutOfRange {
            level,
            max: grid.levels().saturating_sub(1),
        });
    }
    if theta.is_zero() {
        // Averaging function |I|^(-1/2) 1_I.
        let mut f = MatrixField::zero(grid.clone(), d);
        let scale = (grid.cubes_at(level) as f64).sqrt();
        for cell in grid.cells_of_cube(level, cube) {
            *f.cell_mut(cell) = cmat::identity(d) * Complex64::new(scale, 0.0);
        }
        return Ok(f);
    }
    let mut coeffs = HaarCoefficients::zero(grid.clone(), d);
    *coeffs.coeff_mut(level, cube, theta) = cmat::identity(d);
    haar_synthesize(&coeffs)
}
