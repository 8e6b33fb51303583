//! Small helpers over dense complex matrices.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::FieldError;
use crate::Result;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues of `a* a` below this are an error; tiny negatives above it are
/// clipped to zero before taking roots.
pub const PSD_CLIP_TOL: f64 = 1e-12;

pub fn zeros(d: usize) -> CMatrix {
    CMatrix::zeros(d, d)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Hilbert-Schmidt inner product `tr(a* b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

pub fn hs_norm_sq(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn max_abs_entry(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of the positive part `a* a`, clipped per the PSD contract.
pub fn gram_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let gram = a.adjoint() * a;
    psd_eigenvalues(&gram)
}

/// Eigenvalues of a Hermitian PSD matrix with the clip contract applied.
pub fn psd_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(h.clone());
    eig.eigenvalues
        .iter()
        .map(|&l| {
            if l < -PSD_CLIP_TOL {
                Err(FieldError::PsdClipFailure { value: l })
            } else {
                Ok(l.max(0.0))
            }
        })
        .collect()
}

/// Singular values (descending not guaranteed).
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(gram_eigenvalues(a)?.into_iter().map(f64::sqrt).collect())
}

/// Operator norm, i.e. the largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    let gram = a.adjoint() * a;
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l.max(0.0)))
        .sqrt()
}

/// `tr |a|^p` via singular values.
pub fn schatten_p_power(a: &CMatrix, p: f64) -> Result<f64> {
    Ok(singular_values(a)?.iter().map(|s| s.powf(p)).sum())
}

/// Hermitian square root of a PSD matrix.
pub fn psd_sqrt(h: &CMatrix) -> Result<CMatrix> {
    let eig = SymmetricEigen::new(h.clone());
    for &l in eig.eigenvalues.iter() {
        if l < -PSD_CLIP_TOL {
            return Err(FieldError::PsdClipFailure { value: l });
        }
    }
    let d = h.nrows();
    let mut diag = CMatrix::zeros(d, d);
    for i in 0..d {
        diag[(i, i)] = Complex64::new(eig.eigenvalues[i].max(0.0).sqrt(), 0.0);
    }
    let q = &eig.eigenvectors;
    Ok(q * diag * q.adjoint())
}

pub fn random_gaussian<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// A Haar-ish random unitary: Q factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let g = random_gaussian(d, rng);
    g.qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1usize, 2, 5] {
            let u = random_unitary(d, &mut rng);
            let err = max_abs_diff(&(&u.adjoint() * &u), &identity(d));
            assert!(err < 1e-12, "d={d} err={err}");
        }
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let mut m = zeros(3);
        m[(0, 0)] = Complex64::new(-2.0, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(2, 2)] = Complex64::new(0.0, 1.5);
        assert!((operator_norm(&m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn schatten_power_matches_frobenius_at_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_gaussian(4, &mut rng);
        let p2 = schatten_p_power(&a, 2.0).unwrap();
        assert!((p2 - hs_norm_sq(&a)).abs() < 1e-10 * (1.0 + p2));
    }
}
