//! Operator norm on `L_2` of the truncation: power iteration on `T*T` and a
//! dense decomposition for small dimensions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use matrix_field::random::random_field;
use matrix_field::MatrixField;

use crate::error::NormLabError;
use crate::handle::LinearOperatorHandle;
use crate::Result;

/// Dense decompositions are refused above this complex domain dimension.
pub const DENSE_DIMENSION_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    PowerIteration,
    Dense,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    pub norm: f64,
    pub method: String,
    pub iterations: u32,
    pub residual: f64,
    pub converged: bool,
    pub seed: u64,
}

/// Estimate the `L_2 -> L_2` operator norm.
///
/// Power iteration runs on `T*T` from a random start; successive Rayleigh
/// estimates are nondecreasing and the loop stops when their relative change
/// drops below `tol`. Hitting `max_iter` is reported, not an error. The
/// dense method materializes the operator on the cell basis and takes the
/// largest singular value.
pub fn op_norm(
    handle: &LinearOperatorHandle,
    method: NormMethod,
    tol: f64,
    max_iter: u32,
    seed: u64,
) -> Result<NormReport> {
    match method {
        NormMethod::PowerIteration => power_iteration(handle, tol, max_iter, seed),
        NormMethod::Dense => dense_norm(handle, seed),
    }
}

fn power_iteration(
    handle: &LinearOperatorHandle,
    tol: f64,
    max_iter: u32,
    seed: u64,
) -> Result<NormReport> {
    let mut v = random_field(handle.grid(), handle.d(), seed);
    let n0 = v.l2_norm();
    if n0 == 0.0 {
        return Err(NormLabError::DegenerateInput {
            reason: "zero start vector".into(),
        });
    }
    v = v.scale(Complex64::new(1.0 / n0, 0.0));
    let mut sigma_sq_prev = 0.0f64;
    let mut residual = f64::INFINITY;
    let mut iterations = 0u32;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let w = handle.apply_adjoint(&handle.apply(&v)?)?;
        // Rayleigh quotient of T*T at the unit vector v.
        let sigma_sq = v.pairing(&w)?.re.max(0.0);
        let wn = w.l2_norm();
        if wn == 0.0 {
            // T*T v = 0: the iterate is annihilated; the estimate is final.
            return Ok(NormReport {
                norm: sigma_sq.sqrt(),
                method: "power-iteration".into(),
                iterations,
                residual: 0.0,
                converged: true,
                seed,
            });
        }
        residual = (sigma_sq - sigma_sq_prev).abs() / sigma_sq.max(f64::MIN_POSITIVE);
        sigma_sq_prev = sigma_sq;
        v = w.scale(Complex64::new(1.0 / wn, 0.0));
        if residual <= tol {
            converged = true;
            break;
        }
    }
    Ok(NormReport {
        norm: sigma_sq_prev.sqrt(),
        method: "power-iteration".into(),
        iterations,
        residual,
        converged,
    seed,
    })
}

/// Power iteration that starts from a given field and also returns the final
/// iterate; used by the growth search to refine witnesses.
pub fn power_iteration_with_witness(
    handle: &LinearOperatorHandle,
    start: &MatrixField,
    tol: f64,
    max_iter: u32,
) -> Result<(NormReport, MatrixField)> {
    let n0 = start.l2_norm();
    if n0 == 0.0 {
        return Err(NormLabError::DegenerateInput {
            reason: "zero start vector".into(),
        });
    }
    let mut v = start.scale(Complex64::new(1.0 / n0, 0.0));
    let mut sigma_sq_prev = 0.0f64;
    let mut residual = f64::INFINITY;
    let mut iterations = 0u32;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let w = handle.apply_adjoint(&handle.apply(&v)?)?;
        let sigma_sq = v.pairing(&w)?.re.max(0.0);
        let wn = w.l2_norm();
        if wn == 0.0 {
            sigma_sq_prev = sigma_sq;
            converged = true;
            residual = 0.0;
            break;
        }
        residual = (sigma_sq - sigma_sq_prev).abs() / sigma_sq.max(f64::MIN_POSITIVE);
        sigma_sq_prev = sigma_sq;
        v = w.scale(Complex64::new(1.0 / wn, 0.0));
        if residual <= tol {
            converged = true;
            break;
        }
    }
    Ok((
        NormReport {
            norm: sigma_sq_prev.sqrt(),
            method: "power-iteration".into(),
            iterations,
            residual,
            converged,
            seed: 0,
        },
        v,
    ))
}

fn dense_norm(handle: &LinearOperatorHandle, seed: u64) -> Result<NormReport> {
    let dim = handle.dimension();
    if dim > DENSE_DIMENSION_CAP {
        return Err(NormLabError::DimensionTooLarge {
            dim,
            cap: DENSE_DIMENSION_CAP,
        });
    }
    let grid = handle.grid().clone();
    let d = handle.d();
    let cells = grid.cells();
    // The operator is a right-module map, so it is determined by its action
    // on column fields; the materialized matrix has size (cells*d)^2 and the
    // same singular values as the full (cells*d^2)-dimensional map.
    let n = cells * d;
    let mut mat: DMatrix<Complex64> = DMatrix::zeros(n, n);
    for cell in 0..cells {
        for c in 0..d {
            let mut basis = MatrixField::zero(grid.clone(), d);
            basis.cell_mut(cell)[(c, 0)] = Complex64::ONE;
            let image = handle.apply(&basis)?;
            for cell_out in 0..cells {
                for r in 0..d {
                    mat[(cell_out * d + r, cell * d + c)] = image.cell(cell_out)[(r, 0)];
                }
            }
        }
    }
    let sv = mat.singular_values();
    let norm = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    Ok(NormReport {
        norm,
        method: "dense".into(),
        iterations: 0,
        residual: 0.0,
        converged: true,
        seed,
    })
}
