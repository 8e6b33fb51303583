//! Kernel models on the line with matrix values.

use std::sync::Arc;

use matrix_field::cmat::{self, CMatrix};
use num_complex::Complex64;

/// A half-open interval `[left, left + len)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub left: f64,
    pub len: f64,
}

impl Interval {
    pub fn new(left: f64, len: f64) -> Self {
        assert!(len > 0.0);
        Interval { left, len }
    }

    pub fn right(&self) -> f64 {
        self.left + self.len
    }

    /// Translate by `m` times the length.
    pub fn translate(&self, m: i64) -> Interval {
        Interval {
            left: self.left + m as f64 * self.len,
            len: self.len,
        }
    }

    pub fn halves(&self) -> (Interval, Interval) {
        let half = self.len / 2.0;
        (
            Interval {
                left: self.left,
                len: half,
            },
            Interval {
                left: self.left + half,
                len: half,
            },
        )
    }
}

type KernelFn = Arc<dyn Fn(f64, f64) -> CMatrix + Send + Sync>;

/// A kernel `K(x, y)` on the line with `d x d` matrix values and declared
/// Holder exponent.
#[derive(Clone)]
pub struct KernelModel {
    pub dim: usize,
    pub d: usize,
    pub alpha: f64,
    eval: KernelFn,
}

impl KernelModel {
    pub fn new(d: usize, alpha: f64, eval: KernelFn) -> Self {
        KernelModel {
            dim: 1,
            d,
            alpha,
            eval,
        }
    }

    pub fn scalar(alpha: f64, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(
            1,
            alpha,
            Arc::new(move |x, y| {
                CMatrix::from_element(1, 1, Complex64::new(f(x, y), 0.0))
            }),
        )
    }

    /// The Hilbert kernel `1/(x - y)`, the n = 1, alpha = 1 exemplar.
    pub fn hilbert() -> Self {
        Self::scalar(1.0, |x, y| 1.0 / (x - y))
    }

    pub fn eval(&self, x: f64, y: f64) -> CMatrix {
        (self.eval)(x, y)
    }

    /// Even/odd split: `K_e(x,y) = (K(x,y) + K(y,x))/2` and the antisymmetric
    /// complement; `K = K_e + K_o` pointwise.
    pub fn symmetrize(&self) -> (KernelModel, KernelModel) {
        let e1 = self.eval.clone();
        let e2 = self.eval.clone();
        let even = KernelModel {
            dim: self.dim,
            d: self.d,
            alpha: self.alpha,
            eval: Arc::new(move |x, y| {
                (e1(x, y) + e1(y, x)) * Complex64::new(0.5, 0.0)
            }),
        };
        let odd = KernelModel {
            dim: self.dim,
            d: self.d,
            alpha: self.alpha,
            eval: Arc::new(move |x, y| {
                (e2(x, y) - e2(y, x)) * Complex64::new(0.5, 0.0)
            }),
        };
        (even, odd)
    }

    /// Numerical audit of the size condition: max over sample pairs of
    /// `||K(x,y)|| |x-y|^dim`.
    pub fn audit_size(&self, pairs: &[(f64, f64)]) -> f64 {
        pairs
            .iter()
            .filter(|(x, y)| x != y)
            .map(|&(x, y)| cmat::operator_norm(&self.eval(x, y)) * (x - y).abs().powi(self.dim as i32))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_pairs() -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                if i != j {
                    out.push((i as f64 * 0.17, j as f64 * 0.13 + 0.01));
                }
            }
        }
        out
    }

    #[test]
    fn hilbert_kernel_is_odd() {
        let k = KernelModel::hilbert();
        let (ke, ko) = k.symmetrize();
        for &(x, y) in &sample_pairs()[..40] {
            assert!(cmat::max_abs_entry(&ke.eval(x, y)) < 1e-14);
            assert!(cmat::max_abs_diff(&ko.eval(x, y), &k.eval(x, y)) < 1e-14);
        }
    }

    #[test]
    fn symmetric_kernel_has_no_odd_part() {
        let k = KernelModel::scalar(1.0, |x, y| 1.0 / (1.0 + (x - y) * (x - y)));
        let (ke, ko) = k.symmetrize();
        for &(x, y) in &sample_pairs()[..40] {
            assert!(cmat::max_abs_entry(&ko.eval(x, y)) < 1e-14);
            assert!(cmat::max_abs_diff(&ke.eval(x, y), &k.eval(x, y)) < 1e-14);
        }
    }

    #[test]
    fn matrix_kernel_split_is_exact() {
        // A deterministic matrix-valued kernel with no symmetry.
        let k = KernelModel::new(
            2,
            0.5,
            Arc::new(|x, y| {
                let mut m = CMatrix::zeros(2, 2);
                m[(0, 0)] = Complex64::new((3.0 * x + y).sin(), x * y);
                m[(0, 1)] = Complex64::new(x - 2.0 * y, (x + y).cos());
                m[(1, 0)] = Complex64::new(y.exp().min(10.0), 0.3 * x);
                m[(1, 1)] = Complex64::new(1.0 / (1.0 + x * x + y * y), x);
                m
            }),
        );
        let (ke, ko) = k.symmetrize();
        for &(x, y) in &sample_pairs()[..60] {
            let e_sym = cmat::max_abs_diff(&ke.eval(x, y), &ke.eval(y, x));
            let o_anti = cmat::max_abs_diff(&ko.eval(x, y), &(ko.eval(y, x) * Complex64::new(-1.0, 0.0)));
            let recomb = cmat::max_abs_diff(&(ke.eval(x, y) + ko.eval(x, y)), &k.eval(x, y));
            assert!(e_sym < 1e-14 && o_anti < 1e-14 && recomb < 1e-14);
        }
        // Symmetrize is a projection: the even part of the even part is itself.
        let (kee, keo) = ke.symmetrize();
        for &(x, y) in &sample_pairs()[..20] {
            assert!(cmat::max_abs_diff(&kee.eval(x, y), &ke.eval(x, y)) < 1e-14);
            assert!(cmat::max_abs_entry(&keo.eval(x, y)) < 1e-14);
        }
    }

    #[test]
    fn size_audit_of_hilbert_is_one() {
        let k = KernelModel::hilbert();
        let audit = k.audit_size(&sample_pairs());
        assert!((audit - 1.0).abs() < 1e-12);
    }
}
