//! Noncommuting martingale transforms `M_xi f = sum_k xi_(k-1) D_k(f)`.

use matrix_field::MatrixField;

use crate::error::OperatorError;
use crate::{FieldOperator, Result};

/// Apply the martingale transform with adapted coefficients
/// `xi = (xi_0, ..., xi_(L-1))`, `xi_k` level-`k` measurable.
pub fn mart_transform(xi: &[MatrixField], f: &MatrixField) -> Result<MatrixField> {
    let levels = f.levels();
    if xi.len() != levels as usize {
        return Err(OperatorError::ShapeMismatch {
            reason: format!(
                "need {} coefficient fields for {} levels, got {}",
                levels,
                levels,
                xi.len()
            ),
        });
    }
    for (k, x) in xi.iter().enumerate() {
        x.check_same_shape(f).map_err(|e| OperatorError::ShapeMismatch {
            reason: e.to_string(),
        })?;
        if !x.is_level_measurable(k as u32) {
            return Err(OperatorError::NotAdapted { index: k as u32 });
        }
    }
    let mut acc = MatrixField::zero(f.grid().clone(), f.d());
    for k in 1..=levels {
        acc = acc.add(&xi[k as usize - 1].mul(&f.mart_diff(k)?)?)?;
    }
    Ok(acc)
}

/// A martingale transform packaged as an operator.
#[derive(Debug, Clone)]
pub struct MartingaleTransform {
    xi: Vec<MatrixField>,
}

impl MartingaleTransform {
    pub fn new(xi: Vec<MatrixField>) -> Self {
        MartingaleTransform { xi }
    }

    pub fn coefficients(&self) -> &[MatrixField] {
        &self.xi
    }

    /// `sup_k ||xi_k||_infinity`.
    pub fn sup_coefficient_norm(&self) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for x in &self.xi {
            sup = sup.max(matrix_field::norms::lp_norm(x, f64::INFINITY)?);
        }
        Ok(sup)
    }
}

impl FieldOperator for MartingaleTransform {
    fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        mart_transform(&self.xi, f)
    }

    /// `M_xi* g = sum_k D_k(xi_(k-1)* g)`.
    fn apply_adjoint(&self, g: &MatrixField) -> Result<MatrixField> {
        let levels = g.levels();
        if self.xi.len() != levels as usize {
            return Err(OperatorError::ShapeMismatch {
                reason: "coefficient count differs from filtration depth".into(),
            });
        }
        let mut acc = MatrixField::zero(g.grid().clone(), g.d());
        for k in 1..=levels {
            let term = self.xi[k as usize - 1].adjoint().mul(g)?.mart_diff(k)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use matrix_field::random::{
        random_adapted_sequence, random_field, random_unitary_adapted_sequence,
    };
    use matrix_field::{GridSpec, MatrixField};

    #[test]
    fn identity_coefficients_give_centered_field() {
        let grid = GridSpec::standard(1, 5);
        let f = random_field(&grid, 3, 1);
        let xi: Vec<MatrixField> = (0..5)
            .map(|_| MatrixField::constant_identity(grid.clone(), 3))
            .collect();
        let out = mart_transform(&xi, &f).unwrap();
        let expect = f.sub(&f.cond_expect(0).unwrap()).unwrap();
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let grid = GridSpec::standard(1, 3);
        let f = random_field(&grid, 2, 2);
        let xi: Vec<MatrixField> = (0..3).map(|_| MatrixField::zero(grid.clone(), 2)).collect();
        assert!(mart_transform(&xi, &f).unwrap().max_abs_entry() == 0.0);
    }

    #[test]
    fn non_adapted_coefficients_rejected() {
        let grid = GridSpec::standard(1, 3);
        let f = random_field(&grid, 2, 3);
        // xi_0 must be constant; a generic random field is not.
        let xi = vec![
            random_field(&grid, 2, 4),
            MatrixField::zero(grid.clone(), 2),
            MatrixField::zero(grid.clone(), 2),
        ];
        assert!(matches!(
            mart_transform(&xi, &f),
            Err(OperatorError::NotAdapted { index: 0 })
        ));
    }

    #[test]
    fn exact_l2_contraction() {
        let grid = GridSpec::standard(1, 5);
        for seed in 0..10u64 {
            let f = random_field(&grid, 3, 50 + seed);
            let xi = random_adapted_sequence(&grid, 3, 60 + seed);
            let t = MartingaleTransform::new(xi);
            let out = t.apply(&f).unwrap();
            let bound = t.sup_coefficient_norm().unwrap()
                * f.sub(&f.cond_expect(0).unwrap()).unwrap().l2_norm();
            assert!(out.l2_norm() <= bound + 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn unitary_coefficients_preserve_l2() {
        let grid = GridSpec::standard(1, 5);
        for seed in 0..5u64 {
            let f = random_field(&grid, 3, 70 + seed);
            let xi = random_unitary_adapted_sequence(&grid, 3, 80 + seed);
            let out = mart_transform(&xi, &f).unwrap();
            let centered = f.sub(&f.cond_expect(0).unwrap()).unwrap().l2_norm();
            assert!((out.l2_norm() - centered).abs() < 1e-10 * centered.max(1.0));
        }
    }

    #[test]
    fn adjoint_is_consistent_with_pairing() {
        let grid = GridSpec::standard(1, 4);
        let t = MartingaleTransform::new(random_adapted_sequence(&grid, 2, 90));
        let f = random_field(&grid, 2, 91);
        let g = random_field(&grid, 2, 92);
        let lhs = g.pairing(&t.apply(&f).unwrap()).unwrap();
        let rhs = t.apply_adjoint(&g).unwrap().pairing(&f).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));
    }
}
