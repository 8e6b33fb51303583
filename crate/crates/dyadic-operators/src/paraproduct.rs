//! Paraproduct, its adjoint, the Haar multiplier, and the remainder operator
//! of the multiplication splitting `b f = Lambda_b f + R_b f`.

use num_complex::Complex64;

use matrix_field::haar::{haar_analyze, HaarSignature};
use matrix_field::MatrixField;

use crate::error::OperatorError;
use crate::Result;

fn check_pair(b: &MatrixField, f: &MatrixField) -> Result<()> {
    b.check_same_shape(f).map_err(|e| OperatorError::ShapeMismatch {
        reason: e.to_string(),
    })
}

/// Dyadic paraproduct `pi_b(f) = sum_I D_I(b) E_I(f)`, i.e. the level sum
/// `sum_k D_k(b) E_(k-1)(f)`.
pub fn paraproduct(b: &MatrixField, f: &MatrixField) -> Result<MatrixField> {
    check_pair(b, f)?;
    let levels = f.levels();
    let mut acc = MatrixField::zero(f.grid().clone(), f.d());
    let diffs_b = b.martingale_diffs();
    for k in 1..=levels {
        let e = f.cond_expect(k - 1)?;
        acc = acc.add(&diffs_b[k as usize - 1].mul(&e)?)?;
    }
    Ok(acc)
}

/// Adjoint-side paraproduct: `sum_(I,theta) <h^theta_I, b> <h^theta_I, f> 1_I/|I|`,
/// the cube-average projection of `D_I(b) D_I(f)`. It is the adjoint of
/// `f -> pi_(b*)(f)` under the pairing.
pub fn paraproduct_adjoint(b: &MatrixField, f: &MatrixField) -> Result<MatrixField> {
    check_pair(b, f)?;
    let grid = f.grid().clone();
    let cb = haar_analyze(b);
    let cf = haar_analyze(f);
    let mut out = MatrixField::zero(grid.clone(), f.d());
    for j in 0..grid.levels() {
        let density = grid.cubes_at(j) as f64; // 1/|I|
        for q in 0..grid.cubes_at(j) {
            let mut m = nalgebra::DMatrix::zeros(f.d(), f.d());
            for theta in HaarSignature::nonzero(grid.dim()) {
                m += cb.coeff(j, q, theta) * cf.coeff(j, q, theta);
            }
            m *= Complex64::new(density, 0.0);
            for cell in grid.cells_of_cube(j, q) {
                *out.cell_mut(cell) += &m;
            }
        }
    }
    Ok(out)
}

/// Haar multiplier `Lambda_b(f) = sum_k D_k(b) E_k(f)`. Note `E_k`, not
/// `E_(k-1)`: the multiplier is the paraproduct plus the diagonal part.
pub fn haar_multiplier(b: &MatrixField, f: &MatrixField) -> Result<MatrixField> {
    check_pair(b, f)?;
    let levels = f.levels();
    let mut acc = MatrixField::zero(f.grid().clone(), f.d());
    let diffs_b = b.martingale_diffs();
    for k in 1..=levels {
        let e = f.cond_expect(k)?;
        acc = acc.add(&diffs_b[k as usize - 1].mul(&e)?)?;
    }
    Ok(acc)
}

/// Remainder operator `R_b f = sum_k E_(k-1)(b) D_k(f) + E_0(b) E_0(f)`.
///
/// The coarse term makes the splitting `b f = Lambda_b f + R_b f` exact on
/// the finite filtration.
pub fn r_operator(b: &MatrixField, f: &MatrixField) -> Result<MatrixField> {
    check_pair(b, f)?;
    let levels = f.levels();
    let mut acc = b.cond_expect(0)?.mul(&f.cond_expect(0)?)?;
    for k in 1..=levels {
        let e = b.cond_expect(k - 1)?;
        acc = acc.add(&e.mul(&f.mart_diff(k)?)?)?;
    }
    Ok(acc)
}

/// Coefficient form of the remainder: `sum_(I,theta) <b>_I <h^theta_I, f>
/// h^theta_I + E_0(b) E_0(f)`. Equal to [`r_operator`]; kept as the second
/// route for identity audits.
pub fn r_operator_coefficient_form(b: &MatrixField, f: &MatrixField) -> Result<MatrixField> {
    check_pair(b, f)?;
    let grid = f.grid().clone();
    let avgs_b = b.cube_averages();
    let cf = haar_analyze(f);
    let mut out = matrix_field::haar::HaarCoefficients::zero(grid.clone(), f.d());
    for j in 0..grid.levels() {
        for (q, avg) in avgs_b[j as usize].iter().enumerate() {
            for theta in HaarSignature::nonzero(grid.dim()) {
                *out.coeff_mut(j, q, theta) = avg * cf.coeff(j, q, theta);
            }
        }
    }
    let coarse = matrix_field::haar::haar_synthesize(&out)?;
    let coarse_term = b.cond_expect(0)?.mul(&f.cond_expect(0)?)?;
    Ok(coarse.add(&coarse_term)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use matrix_field::random::{random_constant, random_field};
    use matrix_field::{GridSpec, MatrixField};
    use num_complex::Complex64;

    #[test]
    fn constant_symbol_annihilates() {
        let grid = GridSpec::standard(1, 4);
        let b = MatrixField::constant(grid.clone(), random_constant(3, 1));
        let f = random_field(&grid, 3, 2);
        assert!(paraproduct(&b, &f).unwrap().max_abs_entry() < 1e-14);
        assert!(paraproduct_adjoint(&b, &f).unwrap().max_abs_entry() < 1e-14);
        assert!(haar_multiplier(&b, &f).unwrap().max_abs_entry() < 1e-14);
    }

    #[test]
    fn paraproduct_of_constant_argument() {
        // f == c constant: pi_b(c) = (b - E_0 b) c by telescoping.
        let grid = GridSpec::standard(1, 5);
        let b = random_field(&grid, 2, 3);
        let c = MatrixField::constant(grid.clone(), random_constant(2, 4));
        let lhs = paraproduct(&b, &c).unwrap();
        let rhs = b.sub(&b.cond_expect(0).unwrap()).unwrap().mul(&c).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        // The adjoint-side paraproduct kills constant arguments.
        assert!(paraproduct_adjoint(&b, &c).unwrap().max_abs_entry() < 1e-13);
    }

    #[test]
    fn paraproduct_matches_double_loop_oracle() {
        // Literal sum over all cubes for scalars, n=1, L=6.
        let grid = GridSpec::standard(1, 6);
        let b = random_field(&grid, 1, 5);
        let f = random_field(&grid, 1, 6);
        let got = paraproduct(&b, &f).unwrap();
        let cb = haar_analyze(&b);
        let avgs_f = f.cube_averages();
        let mut oracle = MatrixField::zero(grid.clone(), 1);
        for j in 0..6u32 {
            for (q, avg) in avgs_f[j as usize].iter().enumerate() {
                // D_I(b) E_I(f) = <h_I, b> h_I(x) f_I on I.
                let scale = (grid.cubes_at(j) as f64).sqrt();
                let coeff = cb.coeff(j, q, HaarSignature(1));
                let m = coeff * avg;
                for t in 0..2usize {
                    let sign = if t == 0 { 1.0 } else { -1.0 };
                    let child = grid.child(j, q, t);
                    for cell in grid.cells_of_cube(j + 1, child) {
                        *oracle.cell_mut(cell) += &m * Complex64::new(sign * scale, 0.0);
                    }
                }
            }
        }
        assert!(got.max_abs_diff(&oracle).unwrap() < 1e-11);
    }

    #[test]
    fn adjointness_of_paraproduct() {
        let grid = GridSpec::standard(1, 5);
        for seed in 0..5u64 {
            let b = random_field(&grid, 3, 100 + seed);
            let f = random_field(&grid, 3, 200 + seed);
            let g = random_field(&grid, 3, 300 + seed);
            let lhs = g.pairing(&paraproduct(&b, &f).unwrap()).unwrap();
            let rhs = paraproduct_adjoint(&b.adjoint(), &g)
                .unwrap()
                .pairing(&f)
                .unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn adjoint_paraproduct_equals_diagonal_level_sum_in_1d() {
        let grid = GridSpec::standard(1, 5);
        let b = random_field(&grid, 2, 7);
        let f = random_field(&grid, 2, 8);
        let got = paraproduct_adjoint(&b, &f).unwrap();
        let mut expect = MatrixField::zero(grid.clone(), 2);
        for k in 1..=5 {
            expect = expect
                .add(&b.mart_diff(k).unwrap().mul(&f.mart_diff(k).unwrap()).unwrap())
                .unwrap();
        }
        assert!(got.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn multiplication_splitting_is_exact() {
        for (dim, levels, d) in [(1usize, 5u32, 4usize), (2, 3, 4)] {
            let grid = GridSpec::standard(dim, levels);
            let b = random_field(&grid, d, 9);
            let f = random_field(&grid, d, 10);
            let prod = b.mul(&f).unwrap();
            let split = haar_multiplier(&b, &f)
                .unwrap()
                .add(&r_operator(&b, &f).unwrap())
                .unwrap();
            assert!(prod.max_abs_diff(&split).unwrap() < 1e-11);
        }
    }

    #[test]
    fn multiplier_is_homogeneous_in_symbol() {
        let grid = GridSpec::standard(1, 4);
        let b = random_field(&grid, 2, 11);
        let f = random_field(&grid, 2, 12);
        let lam = Complex64::new(0.7, -1.3);
        let lhs = haar_multiplier(&b.scale(lam), &f).unwrap();
        let rhs = haar_multiplier(&b, &f).unwrap().scale(lam);
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn remainder_operator_basics() {
        let grid = GridSpec::standard(1, 4);
        let f = random_field(&grid, 3, 13);
        let c = random_constant(3, 14);
        let b = MatrixField::constant(grid.clone(), c.clone());
        // Constant b: R_b f = c f.
        let lhs = r_operator(&b, &f).unwrap();
        let rhs = MatrixField::constant(grid.clone(), c).mul(&f).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);

        // Constant f: only the coarse term survives.
        let b = random_field(&grid, 3, 15);
        let cf = MatrixField::constant(grid.clone(), random_constant(3, 16));
        let lhs = r_operator(&b, &cf).unwrap();
        let rhs = b.cond_expect(0).unwrap().mul(&cf).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn remainder_forms_agree() {
        for (dim, levels, d) in [(1usize, 5u32, 3usize), (2, 3, 2)] {
            let grid = GridSpec::standard(dim, levels);
            let b = random_field(&grid, d, 17);
            let f = random_field(&grid, d, 18);
            let a = r_operator(&b, &f).unwrap();
            let c = r_operator_coefficient_form(&b, &f).unwrap();
            assert!(a.max_abs_diff(&c).unwrap() < 1e-11);
        }
    }
}
