//! Composite midpoint quadrature for kernel double integrals, with
//! refinement-doubling error estimates and a symmetric-pair principal-value
//! rule for blocks touching the diagonal.

use matrix_field::cmat::{self, CMatrix};
use num_complex::Complex64;

use crate::error::KernelError;
use crate::kernel::{Interval, KernelModel};
use crate::Result;

/// Midpoint rule on `x_range x y_range` with `2^level` nodes per axis.
///
/// When `pv` is set, node pairs with `x == y` are skipped; together with the
/// symmetric enumeration of the remaining pairs this realizes the
/// symmetric-pair cancellation rule (exact for odd kernels on squares).
pub fn block_integral(
    k: &KernelModel,
    x_range: Interval,
    y_range: Interval,
    level: u32,
    pv: bool,
) -> CMatrix {
    let n = 1usize << level;
    let hx = x_range.len / n as f64;
    let hy = y_range.len / n as f64;
    let mut acc = CMatrix::zeros(k.d, k.d);
    for i in 0..n {
        let x = x_range.left + (i as f64 + 0.5) * hx;
        for j in 0..n {
            let y = y_range.left + (j as f64 + 0.5) * hy;
            if pv && x == y {
                continue;
            }
            acc += k.eval(x, y);
        }
    }
    acc * Complex64::new(hx * hy, 0.0)
}

/// Block integral with a refinement-doubling error estimate: returns the
/// finer value and `||Q(level+1) - Q(level)||`.
pub fn block_integral_refined(
    k: &KernelModel,
    x_range: Interval,
    y_range: Interval,
    level: u32,
    pv: bool,
) -> (CMatrix, f64) {
    let coarse = block_integral(k, x_range, y_range, level, pv);
    let fine = block_integral(k, x_range, y_range, level + 1, pv);
    let err = cmat::max_abs_diff(&coarse, &fine);
    (fine, err)
}

/// Three-level stabilization check: refuses estimates whose refinement error
/// grows instead of shrinking.
pub fn block_integral_stabilized(
    k: &KernelModel,
    x_range: Interval,
    y_range: Interval,
    level: u32,
    pv: bool,
) -> Result<(CMatrix, f64)> {
    let q0 = block_integral(k, x_range, y_range, level, pv);
    let q1 = block_integral(k, x_range, y_range, level + 1, pv);
    let q2 = block_integral(k, x_range, y_range, level + 2, pv);
    let e1 = cmat::max_abs_diff(&q0, &q1);
    let e2 = cmat::max_abs_diff(&q1, &q2);
    let scale = cmat::max_abs_entry(&q2).max(1.0);
    if e2 > e1 && e2 > 1e-12 * scale {
        return Err(KernelError::QuadratureFailure {
            first: e1,
            second: e2,
        });
    }
    Ok((q2, e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_kernel_integrates_to_area() {
        let k = KernelModel::scalar(1.0, |_, _| 1.0);
        let (q, err) = block_integral_refined(
            &k,
            Interval::new(0.0, 2.0),
            Interval::new(1.0, 3.0),
            4,
            false,
        );
        assert!((q[(0, 0)].re - 6.0).abs() < 1e-12);
        assert!(err < 1e-12);
    }

    #[test]
    fn pv_rule_kills_odd_kernels_on_squares() {
        let k = KernelModel::hilbert();
        let sq = Interval::new(0.25, 0.5);
        let q = block_integral(&k, sq, sq, 5, true);
        assert!(q[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn refinement_estimate_shrinks_for_smooth_blocks() {
        let k = KernelModel::hilbert();
        let x = Interval::new(4.0, 1.0);
        let y = Interval::new(0.0, 1.0);
        let (_, e_coarse) = block_integral_refined(&k, x, y, 3, false);
        let (_, e_fine) = block_integral_refined(&k, x, y, 6, false);
        assert!(e_fine < e_coarse);
        assert!(block_integral_stabilized(&k, x, y, 4, false).is_ok());
    }
}
