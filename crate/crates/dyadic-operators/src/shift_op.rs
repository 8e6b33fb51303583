//! Dyadic shifts `S f = sum_(I, theta != 0) eps^theta_I <h^(theta_0)_I, f>
//! h^theta_(parent I)` and their commutators with multiplication operators.
//!
//! Input coefficients live on cubes at levels `1..levels-1`; the level-0 cube
//! has no parent on the torus, so its coefficient maps to zero.

use std::sync::Arc;

use matrix_field::haar::{haar_analyze, haar_synthesize, HaarCoefficients, HaarSignature};
use matrix_field::{GridSpec, MatrixField};

use crate::error::OperatorError;
use crate::paraproduct::haar_multiplier;
use crate::{FieldOperator, Result};

#[derive(Debug, Clone)]
pub struct DyadicShift {
    grid: Arc<GridSpec>,
    /// signs[j-1][cube * (2^n - 1) + theta - 1] for source cubes at level j.
    signs: Vec<Vec<i8>>,
}

impl DyadicShift {
    /// Build from a sign rule `(level, cube, theta) -> +-1`; levels run over
    /// the source cubes `1..levels-1`.
    pub fn from_fn(
        grid: Arc<GridSpec>,
        mut rule: impl FnMut(u32, usize, HaarSignature) -> i8,
    ) -> Self {
        let sigs = grid.corners() - 1;
        let top = grid.levels().saturating_sub(1);
        let signs = (1..=top)
            .map(|j| {
                let mut row = Vec::with_capacity(grid.cubes_at(j) * sigs);
                for q in 0..grid.cubes_at(j) {
                    for theta in HaarSignature::nonzero(grid.dim()) {
                        row.push(rule(j, q, theta).signum().max(-1));
                    }
                }
                row
            })
            .collect();
        DyadicShift { grid, signs }
    }

    /// The fixed one-dimensional sign pattern: +1 on left children, -1 on
    /// right children. Averages of this shift over random grids line up with
    /// the Hilbert transform (up to one fitted scalar).
    pub fn petermichl(grid: Arc<GridSpec>) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(OperatorError::ShapeMismatch {
                reason: "the Petermichl sign pattern is one-dimensional".into(),
            });
        }
        let g = grid.clone();
        Ok(Self::from_fn(grid, move |j, q, _| {
            if g.corner_of(j, q) == 0 {
                1
            } else {
                -1
            }
        }))
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn sign(&self, level: u32, cube: usize, theta: HaarSignature) -> i8 {
        let sigs = self.grid.corners() - 1;
        self.signs[level as usize - 1][cube * sigs + theta.0 as usize - 1]
    }

    pub fn signs(&self) -> &[Vec<i8>] {
        &self.signs
    }

    pub fn from_signs(grid: Arc<GridSpec>, signs: Vec<Vec<i8>>) -> Result<Self> {
        let sigs = grid.corners() - 1;
        let top = grid.levels().saturating_sub(1);
        if signs.len() != top as usize {
            return Err(OperatorError::ShapeMismatch {
                reason: format!("expected {} sign levels, got {}", top, signs.len()),
            });
        }
        for (i, row) in signs.iter().enumerate() {
            let expect = grid.cubes_at(i as u32 + 1) * sigs;
            if row.len() != expect {
                return Err(OperatorError::ShapeMismatch {
                    reason: format!("sign level {i} holds {} slots, expected {expect}", row.len()),
                });
            }
        }
        Ok(DyadicShift { grid, signs })
    }
}

impl FieldOperator for DyadicShift {
    fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        if !self.grid.same_shape(f.grid()) {
            return Err(OperatorError::ShapeMismatch {
                reason: "shift and field live on different shapes".into(),
            });
        }
        let grid = f.grid();
        let theta0 = HaarSignature::theta_zero(grid.dim());
        let cf = haar_analyze(f);
        let mut out = HaarCoefficients::zero(grid.clone(), f.d());
        for j in 1..grid.levels() {
            for q in 0..grid.cubes_at(j) {
                let input = cf.coeff(j, q, theta0);
                let parent = grid.parent(j, q);
                for theta in HaarSignature::nonzero(grid.dim()) {
                    let s = f64::from(self.sign(j, q, theta));
                    *out.coeff_mut(j - 1, parent, theta) +=
                        input * num_complex::Complex64::new(s, 0.0);
                }
            }
        }
        Ok(haar_synthesize(&out)?)
    }

    fn apply_adjoint(&self, g: &MatrixField) -> Result<MatrixField> {
        if !self.grid.same_shape(g.grid()) {
            return Err(OperatorError::ShapeMismatch {
                reason: "shift and field live on different shapes".into(),
            });
        }
        let grid = g.grid();
        let theta0 = HaarSignature::theta_zero(grid.dim());
        let cg = haar_analyze(g);
        let mut out = HaarCoefficients::zero(grid.clone(), g.d());
        for j in 1..grid.levels() {
            for q in 0..grid.cubes_at(j) {
                let parent = grid.parent(j, q);
                let mut acc = nalgebra::DMatrix::zeros(g.d(), g.d());
                for theta in HaarSignature::nonzero(grid.dim()) {
                    let s = f64::from(self.sign(j, q, theta));
                    acc += cg.coeff(j - 1, parent, theta)
                        * num_complex::Complex64::new(s, 0.0);
                }
                *out.coeff_mut(j, q, theta0) = acc;
            }
        }
        Ok(haar_synthesize(&out)?)
    }
}

/// Commutator `[S, b] f = S(b f) - b S(f)` computed directly.
pub fn commutator(s: &DyadicShift, b: &MatrixField, f: &MatrixField) -> Result<MatrixField> {
    b.check_same_shape(f).map_err(|e| OperatorError::ShapeMismatch {
        reason: e.to_string(),
    })?;
    let lhs = s.apply(&b.mul(f)?)?;
    let rhs = b.mul(&s.apply(f)?)?;
    Ok(lhs.sub(&rhs)?)
}

/// The closed coefficient formula for `[S, R_b] f`: only parent pairs
/// `J = parent(I)` contribute, with coefficient `eps^theta_I (<b>_I - <b>_J)`.
///
/// With the coarse-inclusive remainder convention (`R_b` carries the
/// `E_0(b) E_0(f)` term) the full audit identity
/// `[S, b] f = [S, Lambda_b] f + formula` holds with no residual coarse
/// correction.
pub fn commutator_formula(
    s: &DyadicShift,
    b: &MatrixField,
    f: &MatrixField,
) -> Result<MatrixField> {
    b.check_same_shape(f).map_err(|e| OperatorError::ShapeMismatch {
        reason: e.to_string(),
    })?;
    let grid = f.grid();
    let theta0 = HaarSignature::theta_zero(grid.dim());
    let cf = haar_analyze(f);
    let avgs_b = b.cube_averages();
    let mut out = HaarCoefficients::zero(grid.clone(), f.d());
    for j in 1..grid.levels() {
        for q in 0..grid.cubes_at(j) {
            let parent = grid.parent(j, q);
            let delta = &avgs_b[j as usize][q] - &avgs_b[j as usize - 1][parent];
            let term = &delta * cf.coeff(j, q, theta0);
            for theta in HaarSignature::nonzero(grid.dim()) {
                let sgn = f64::from(s.sign(j, q, theta));
                *out.coeff_mut(j - 1, parent, theta) +=
                    &term * num_complex::Complex64::new(sgn, 0.0);
            }
        }
    }
    Ok(haar_synthesize(&out)?)
}

/// Residual of the commutator audit
/// `[S,b]f - [S, Lambda_b]f - commutator_formula(S,b,f)`; the identity makes
/// it vanish to rounding error.
pub fn commutator_audit_residual(
    s: &DyadicShift,
    b: &MatrixField,
    f: &MatrixField,
) -> Result<f64> {
    let direct = commutator(s, b, f)?;
    let lambda_comm = s
        .apply(&haar_multiplier(b, f)?)?
        .sub(&haar_multiplier(b, &s.apply(f)?)?)?;
    let formula = commutator_formula(s, b, f)?;
    let residual = direct.sub(&lambda_comm)?.sub(&formula)?;
    Ok(residual.max_abs_entry())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_shift;
    use matrix_field::haar::haar_basis_field;
    use matrix_field::random::{random_constant, random_field};
    use num_complex::Complex64;

    #[test]
    fn single_coefficient_maps_to_parent() {
        let grid = GridSpec::standard(1, 4);
        let s = random_shift(&grid, 3);
        let d = 2;
        let u = random_constant(d, 5);
        let h = haar_basis_field(&grid, d, 2, 1, HaarSignature(1))
            .unwrap()
            .mul(&MatrixField::constant(grid.clone(), u.clone()))
            .unwrap();
        let out = s.apply(&h).unwrap();
        let c = haar_analyze(&out);
        let sgn = f64::from(s.sign(2, 1, HaarSignature(1)));
        let expect = &u * Complex64::new(sgn, 0.0);
        assert!(matrix_field::cmat::max_abs_diff(c.coeff(1, 0, HaarSignature(1)), &expect) < 1e-12);
        // Norm multiplies by sqrt(2^n - 1) = 1 for n = 1.
        assert!((out.l2_norm() - h.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn constants_map_to_zero() {
        let grid = GridSpec::standard(2, 3);
        let s = random_shift(&grid, 7);
        let c = MatrixField::constant(grid.clone(), random_constant(2, 8));
        assert!(s.apply(&c).unwrap().max_abs_entry() < 1e-14);
    }

    #[test]
    fn l2_bound_with_multiplicity() {
        // ||S f||_2 <= 2^(n/2) sqrt(2^n - 1) ||f||_2; single-coefficient
        // inputs meet sqrt(2^n - 1) exactly.
        for (dim, levels) in [(1usize, 5u32), (2, 3)] {
            let grid = GridSpec::standard(dim, levels);
            let bound = (grid.corners() as f64).sqrt() * ((grid.corners() - 1) as f64).sqrt();
            for seed in 0..6u64 {
                let s = random_shift(&grid, 100 + seed);
                let f = random_field(&grid, 2, 200 + seed);
                let ratio = s.apply(&f).unwrap().l2_norm() / f.l2_norm();
                assert!(ratio <= bound + 1e-10, "dim {dim} ratio {ratio}");
            }
            // Equality case for one coefficient.
            let s = random_shift(&grid, 300);
            let theta0 = HaarSignature::theta_zero(dim);
            let h = haar_basis_field(&grid, 2, 1, 0, theta0).unwrap();
            let ratio = s.apply(&h).unwrap().l2_norm() / h.l2_norm();
            let single = ((grid.corners() - 1) as f64).sqrt();
            assert!((ratio - single).abs() < 1e-10);
        }
    }

    #[test]
    fn adjoint_consistency() {
        let grid = GridSpec::standard(2, 3);
        let s = random_shift(&grid, 11);
        let f = random_field(&grid, 2, 1);
        let g = random_field(&grid, 2, 2);
        let lhs = g.pairing(&s.apply(&f).unwrap()).unwrap();
        let rhs = s.apply_adjoint(&g).unwrap().pairing(&f).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));
    }

    #[test]
    fn commutator_with_constant_symbol_vanishes() {
        let grid = GridSpec::standard(1, 4);
        let s = random_shift(&grid, 13);
        let b = MatrixField::constant(grid.clone(), random_constant(3, 14));
        let f = random_field(&grid, 3, 15);
        // Constant b commutes with S: both sides carry b on the left of
        // every coefficient.
        let c = commutator(&s, &b, &f).unwrap();
        assert!(c.max_abs_entry() < 1e-12);
        assert!(commutator_formula(&s, &b, &f).unwrap().max_abs_entry() < 1e-13);
    }

    #[test]
    fn scalar_symbol_matches_hand_expansion() {
        // Oracle: for f = h_J, S f = eps_J h_(parent J), so
        // [S, b] h_J = S(b h_J) - b eps_J h_(parent J).
        let grid = GridSpec::standard(1, 4);
        let s = random_shift(&grid, 17);
        let b = random_field(&grid, 1, 18);
        let (j, q) = (2u32, 3usize);
        let h = haar_basis_field(&grid, 1, j, q, HaarSignature(1)).unwrap();
        let eps = f64::from(s.sign(j, q, HaarSignature(1)));
        let h_parent = haar_basis_field(&grid, 1, j - 1, grid.parent(j, q), HaarSignature(1))
            .unwrap()
            .scale(Complex64::new(eps, 0.0));
        let oracle = s
            .apply(&b.mul(&h).unwrap())
            .unwrap()
            .sub(&b.mul(&h_parent).unwrap())
            .unwrap();
        let via = commutator(&s, &b, &h).unwrap();
        assert!(oracle.max_abs_diff(&via).unwrap() < 1e-12);
    }

    #[test]
    fn commutator_is_bilinear() {
        let grid = GridSpec::standard(1, 4);
        let s = random_shift(&grid, 19);
        let b1 = random_field(&grid, 2, 20);
        let b2 = random_field(&grid, 2, 21);
        let f = random_field(&grid, 2, 22);
        let lam = Complex64::new(0.5, 2.0);
        let lhs = commutator(&s, &b1.scale(lam).add(&b2).unwrap(), &f).unwrap();
        let rhs = commutator(&s, &b1, &f)
            .unwrap()
            .scale(lam)
            .add(&commutator(&s, &b2, &f).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-11);
    }

    #[test]
    fn full_commutator_audit() {
        for (dim, levels, d) in [(1usize, 6u32, 3usize), (2, 3, 2)] {
            let grid = GridSpec::standard(dim, levels);
            for seed in 0..5u64 {
                let s = random_shift(&grid, 400 + seed);
                let b = random_field(&grid, d, 500 + seed);
                let f = random_field(&grid, d, 600 + seed);
                let res = commutator_audit_residual(&s, &b, &f).unwrap();
                let scale = b.max_abs_entry() * f.max_abs_entry();
                assert!(res <= 1e-10 * scale.max(1.0), "dim {dim} seed {seed}: {res}");
            }
        }
    }

    #[test]
    fn petermichl_signs_follow_corners() {
        let grid = GridSpec::standard(1, 3);
        let s = DyadicShift::petermichl(grid.clone()).unwrap();
        for j in 1..3u32 {
            for q in 0..grid.cubes_at(j) {
                let expect = if grid.corner_of(j, q) == 0 { 1 } else { -1 };
                assert_eq!(s.sign(j, q, HaarSignature(1)), expect);
            }
        }
    }
}
