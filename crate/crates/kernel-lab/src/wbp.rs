//! Weak boundedness audit: `sup_I ||int int_(I x I) K|| / |I|` over supplied
//! intervals, with the principal-value rule on the diagonal squares.

use matrix_field::cmat;

use crate::kernel::{Interval, KernelModel};
use crate::quadrature::block_integral_stabilized;
use crate::Result;

/// Returns the audit value and the largest quadrature error estimate among
/// the cubes.
pub fn wbp_audit(k: &KernelModel, cubes: &[Interval], level: u32) -> Result<(f64, f64)> {
    let mut sup = 0.0f64;
    let mut worst_err = 0.0f64;
    for &i in cubes {
        let (q, err) = block_integral_stabilized(k, i, i, level, true)?;
        sup = sup.max(cmat::operator_norm(&q) / i.len);
        worst_err = worst_err.max(err / i.len);
    }
    Ok((sup, worst_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic_cubes() -> Vec<Interval> {
        let mut out = Vec::new();
        for j in 0..5u32 {
            let len = 0.5f64.powi(j as i32);
            for q in 0..(1u64 << j) {
                out.push(Interval::new(q as f64 * len, len));
            }
        }
        out
    }

    #[test]
    fn antisymmetric_kernel_audits_to_zero() {
        let k = KernelModel::hilbert();
        let (value, _) = wbp_audit(&k, &dyadic_cubes(), 4).unwrap();
        assert!(value < 1e-10, "audit {value}");
    }

    #[test]
    fn zero_kernel_audits_to_zero() {
        let k = KernelModel::scalar(1.0, |_, _| 0.0);
        let (value, err) = wbp_audit(&k, &dyadic_cubes(), 3).unwrap();
        assert_eq!(value, 0.0);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn constant_kernel_audits_to_largest_volume() {
        let k = KernelModel::scalar(1.0, |_, _| 1.0);
        let (value, _) = wbp_audit(&k, &dyadic_cubes(), 4).unwrap();
        // int int_(I x I) 1 = |I|^2, so the sup of |I|^2/|I| is the largest
        // length. The diagonal-skipping PV rule forfeits an O(1/nodes) strip
        // on non-odd kernels, hence the loose tolerance.
        assert!((value - 1.0).abs() < 0.02, "audit {value}");
    }
}
