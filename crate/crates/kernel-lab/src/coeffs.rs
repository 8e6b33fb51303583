//! Haar coefficients of kernel operators, `<h_(I+m), T h_I>`, and the decay
//! fit of their norms against the translation distance.

use matrix_field::cmat::{self, CMatrix};
use num_complex::Complex64;

use crate::error::KernelError;
use crate::kernel::{Interval, KernelModel};
use crate::quadrature::block_integral_refined;
use crate::Result;

fn profile_blocks(i: Interval, sigma: u8) -> Vec<(Interval, f64)> {
    if sigma == 0 {
        vec![(i, 1.0)]
    } else {
        let (lo, hi) = i.halves();
        vec![(lo, 1.0), (hi, -1.0)]
    }
}

/// Bracket `<h^eta_(I+m), T h^theta_I>` of the kernel operator against the
/// one-dimensional Haar profiles (`0` averaging, `1` oscillating), by
/// composite quadrature at `2^level` nodes per axis and block; returns the
/// value and a refinement-doubling error estimate.
///
/// Supports touching the diagonal (`|m| <= 1`) require the principal-value
/// rule; without it the call fails with `SingularOverlap`.
pub fn kernel_bracket(
    k: &KernelModel,
    i: Interval,
    m: i64,
    level: u32,
    pv: bool,
    eta: u8,
    theta: u8,
) -> Result<(CMatrix, f64)> {
    if m.abs() <= 1 && !pv {
        return Err(KernelError::SingularOverlap { m });
    }
    let im = i.translate(m);
    let norm = 1.0 / i.len; // |I|^(-1/2) * |I+m|^(-1/2)
    let mut acc = CMatrix::zeros(k.d, k.d);
    let mut err = 0.0f64;
    for (x_range, sx) in profile_blocks(im, eta) {
        for (y_range, sy) in profile_blocks(i, theta) {
            let (q, e) = block_integral_refined(k, x_range, y_range, level, pv);
            acc += q * Complex64::new(sx * sy * norm, 0.0);
            err += e * norm;
        }
    }
    Ok((acc, err))
}

/// `int int h_(I+m)(x) K(x,y) h_I(y) dy dx`: the oscillating-oscillating
/// bracket.
pub fn haar_coeff_kernel(
    k: &KernelModel,
    i: Interval,
    m: i64,
    level: u32,
    pv: bool,
) -> Result<(CMatrix, f64)> {
    kernel_bracket(k, i, m, level, pv, 1, 1)
}

#[derive(Debug, Clone)]
pub struct DecayFit {
    pub exponent: f64,
    pub r_squared: f64,
    /// `(m, coefficient norm, quadrature error estimate)` per sample.
    pub points: Vec<(i64, f64, f64)>,
}

/// Least-squares slope of `log ||coefficient||` against `log(1 + |m|)`.
///
/// The coefficient at each `m` is the sup of the bracket norms over the
/// signature pairs that enter the translated expansion: oscillating against
/// oscillating and the two mixed pairs. For a smooth kernel the
/// oscillating-oscillating bracket gains one extra order per vanishing
/// moment, so the sup (and the theory's rate `-(n + alpha)`) is set by the
/// mixed pairs. The averaging-averaging pair never enters the expansion and
/// would only decay at the size-condition rate.
pub fn decay_fit(
    k: &KernelModel,
    i: Interval,
    m_values: &[i64],
    level: u32,
) -> Result<DecayFit> {
    if m_values.len() < 8 {
        return Err(KernelError::InsufficientPoints {
            need: 8,
            got: m_values.len(),
        });
    }
    let mut points = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let mut norm = 0.0f64;
        let mut err = 0.0f64;
        for (eta, theta) in [(1u8, 1u8), (0, 1), (1, 0)] {
            let (coeff, e) = kernel_bracket(k, i, m, level, false, eta, theta)?;
            norm = norm.max(cmat::operator_norm(&coeff));
            err = err.max(e);
        }
        points.push((m, norm, err));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, norm, _)| *norm > 0.0)
        .map(|&(m, norm, _)| (((1 + m.unsigned_abs()) as f64).ln(), norm.ln()))
        .collect();
    if xy.len() < 8 {
        return Err(KernelError::InsufficientPoints {
            need: 8,
            got: xy.len(),
        });
    }
    let n = xy.len() as f64;
    let mean_x = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayFit {
        exponent: slope,
        r_squared,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Antiderivative pieces: `phi(t) = t ln|t| - t`, so that
    /// `int int_(rect) 1/(x-y) = phi(a2-b1) + phi(a1-b2) - phi(a1-b1) - phi(a2-b2)`.
    fn phi(t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t * t.abs().ln() - t
        }
    }

    fn hilbert_rect(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
        phi(a2 - b1) + phi(a1 - b2) - phi(a1 - b1) - phi(a2 - b2)
    }

    fn hilbert_coeff_closed_form(i: Interval, m: i64) -> f64 {
        let im = i.translate(m);
        let (xl, xh) = im.halves();
        let (yl, yh) = i.halves();
        let mut acc = 0.0;
        for (x, sx) in [(xl, 1.0), (xh, -1.0)] {
            for (y, sy) in [(yl, 1.0), (yh, -1.0)] {
                acc += sx * sy * hilbert_rect(x.left, x.right(), y.left, y.right());
            }
        }
        acc / i.len
    }

    #[test]
    fn zero_kernel_gives_zero_coefficient() {
        let k = KernelModel::scalar(1.0, |_, _| 0.0);
        let (c, err) = haar_coeff_kernel(&k, Interval::new(0.0, 1.0), 4, 6, false).unwrap();
        assert_eq!(c[(0, 0)], Complex64::ZERO);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn quadrature_matches_closed_form_at_m4() {
        let k = KernelModel::hilbert();
        let i = Interval::new(0.0, 1.0);
        let oracle = hilbert_coeff_closed_form(i, 4);
        let (c, err) = haar_coeff_kernel(&k, i, 4, 10, false).unwrap();
        let got = c[(0, 0)].re;
        assert!(
            (got - oracle).abs() <= 1e-8,
            "quadrature {got} vs closed form {oracle} (err est {err})"
        );
    }

    #[test]
    fn singular_overlap_needs_pv() {
        let k = KernelModel::hilbert();
        assert!(matches!(
            haar_coeff_kernel(&k, Interval::new(0.0, 1.0), 0, 4, false),
            Err(KernelError::SingularOverlap { m: 0 })
        ));
        assert!(haar_coeff_kernel(&k, Interval::new(0.0, 1.0), 0, 4, true).is_ok());
    }

    #[test]
    fn coefficients_decay_monotonically() {
        let k = KernelModel::hilbert();
        let i = Interval::new(0.0, 1.0);
        let mut last = f64::INFINITY;
        for m in [2i64, 4, 8, 16, 32, 64] {
            let (c, _) = haar_coeff_kernel(&k, i, m, 8, false).unwrap();
            let norm = c[(0, 0)].norm();
            assert!(norm < last, "m {m}");
            last = norm;
        }
    }

    #[test]
    fn hilbert_decay_exponent_is_near_minus_two() {
        let k = KernelModel::hilbert();
        let ms: Vec<i64> = (2..=64).collect();
        let fit = decay_fit(&k, Interval::new(0.0, 1.0), &ms, 7).unwrap();
        assert!(
            (-2.3..=-1.7).contains(&fit.exponent),
            "exponent {}",
            fit.exponent
        );
        assert!(fit.r_squared >= 0.98, "r^2 {}", fit.r_squared);
        // Scaling the kernel shifts the intercept, not the slope.
        let k2 = KernelModel::scalar(1.0, |x, y| 3.5 / (x - y));
        let fit2 = decay_fit(&k2, Interval::new(0.0, 1.0), &ms, 7).unwrap();
        assert!((fit.exponent - fit2.exponent).abs() < 1e-9);
    }

    #[test]
    fn smoothed_kernel_keeps_the_contract() {
        // |x-y| >= 2 for all sampled blocks, so the smoothing is inert and
        // alpha = 1 decay appears as before.
        let k = KernelModel::scalar(1.0, |x, y| {
            let t = x - y;
            t.signum() / t.abs().max(0.05)
        });
        let ms: Vec<i64> = (2..=40).collect();
        let fit = decay_fit(&k, Interval::new(0.0, 1.0), &ms, 7).unwrap();
        assert!(
            (-2.3..=-1.7).contains(&fit.exponent),
            "exponent {}",
            fit.exponent
        );
    }

    #[test]
    fn insufficient_points_rejected() {
        let k = KernelModel::hilbert();
        let ms: Vec<i64> = (2..=8).collect();
        assert!(matches!(
            decay_fit(&k, Interval::new(0.0, 1.0), &ms, 5),
            Err(KernelError::InsufficientPoints { .. })
        ));
    }

}
