//! Dimension-growth search for the paraproduct operator norm.
//!
//! For each matrix size `d` the search maximizes
//! `||pi_b||_(2->2) / ||b||_inf` over symbols `b`, by random sampling plus
//! local perturbation, always seeding the candidate pool with the block
//! embedding of the best smaller-`d` symbol. Block embedding preserves both
//! norms and carries its witness along, so the best-ratio column is
//! nondecreasing in `d` by construction. Ratios are reported from witness
//! fields (`||pi_b v||_2 / ||v||_2`), hence are certified lower bounds on
//! the operator norm.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use dyadic_grid::seeding;
use dyadic_operators::paraproduct;
use matrix_field::norms::lp_norm;
use matrix_field::random::random_field;
use matrix_field::{CMatrix, GridSpec, MatrixField};

use crate::error::NormLabError;
use crate::handle::LinearOperatorHandle;
use crate::opnorm::power_iteration_with_witness;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub d: usize,
    pub ratio: f64,
    pub seed: u64,
    pub iterations: u32,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GrowthBudget {
    pub random_candidates: u32,
    pub perturbations: u32,
    pub power_iters: u32,
    pub tol: f64,
}

impl Default for GrowthBudget {
    fn default() -> Self {
        GrowthBudget {
            random_candidates: 8,
            perturbations: 8,
            power_iters: 120,
            tol: 1e-9,
        }
    }
}

struct Candidate {
    symbol: MatrixField,
    witness: MatrixField,
    ratio: f64,
    iterations: u32,
    residual: f64,
}

fn witness_ratio(b: &MatrixField, v: &MatrixField) -> Result<f64> {
    let denom = v.l2_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(paraproduct(b, v)?.l2_norm() / denom)
}

fn normalize_symbol(b: MatrixField) -> Result<MatrixField> {
    let sup = lp_norm(&b, f64::INFINITY)?;
    if sup <= 1e-14 {
        return Err(NormLabError::DegenerateInput {
            reason: "symbol has vanishing sup norm".into(),
        });
    }
    Ok(b.scale(Complex64::new(1.0 / sup, 0.0)))
}

fn evaluate(
    grid: &Arc<GridSpec>,
    d: usize,
    symbol: MatrixField,
    start: &MatrixField,
    budget: &GrowthBudget,
) -> Result<Candidate> {
    let b = symbol.clone();
    let b2 = symbol.clone();
    let handle = LinearOperatorHandle::new(
        grid.clone(),
        d,
        Arc::new(move |f| paraproduct(&b, f)),
        Arc::new(move |f| dyadic_operators::paraproduct_adjoint(&b2.adjoint(), f)),
    );
    let (report, witness) =
        power_iteration_with_witness(&handle, start, budget.tol, budget.power_iters)?;
    let ratio = witness_ratio(&symbol, &witness)?;
    Ok(Candidate {
        symbol,
        witness,
        ratio,
        iterations: report.iterations,
        residual: report.residual,
    })
}

/// Scale-ladder symbol: the Haar coefficient at every cube of level `j` is
/// the matrix unit shifting slot `j` to slot `j+1` (or back). Triangular
/// ladders of this kind are the structure behind paraproduct dimension
/// growth, so they are seeded into every candidate pool.
fn ladder_symbol(grid: &Arc<GridSpec>, d: usize, up: bool) -> MatrixField {
    use matrix_field::haar::{haar_synthesize, HaarCoefficients, HaarSignature};
    let mut coeffs = HaarCoefficients::zero(grid.clone(), d);
    for j in 0..grid.levels().min(d as u32 - 1) {
        let (r, c) = if up {
            (j as usize, j as usize + 1)
        } else {
            (j as usize + 1, j as usize)
        };
        let mut m = CMatrix::zeros(d, d);
        m[(r, c)] = Complex64::ONE;
        for q in 0..grid.cubes_at(j) {
            for theta in HaarSignature::nonzero(grid.dim()) {
                *coeffs.coeff_mut(j, q, theta) = m.clone();
            }
        }
    }
    haar_synthesize(&coeffs).expect("layout matches grid")
}

/// Block-diagonal embedding of a symbol into `copies * d` dimensions.
fn block_embed_symbol(b: &MatrixField, copies: usize) -> MatrixField {
    let d = b.d();
    let big = copies * d;
    let mut out = MatrixField::zero(b.grid().clone(), big);
    for (i, cell) in b.cells().iter().enumerate() {
        let mut m = CMatrix::zeros(big, big);
        for blk in 0..copies {
            for r in 0..d {
                for c in 0..d {
                    m[(blk * d + r, blk * d + c)] = cell[(r, c)];
                }
            }
        }
        *out.cell_mut(i) = m;
    }
    out
}

/// Embed a witness into the top-left block (zero elsewhere); the paraproduct
/// of the embedded pair reproduces the small ratio exactly.
fn block_embed_witness(v: &MatrixField, big: usize) -> MatrixField {
    let d = v.d();
    let mut out = MatrixField::zero(v.grid().clone(), big);
    for (i, cell) in v.cells().iter().enumerate() {
        let mut m = CMatrix::zeros(big, big);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = cell[(r, c)];
            }
        }
        *out.cell_mut(i) = m;
    }
    out
}

/// Run the growth experiment over an ascending list of matrix sizes.
pub fn paraproduct_growth(
    grid: &Arc<GridSpec>,
    d_list: &[usize],
    budget: &GrowthBudget,
    seed: u64,
) -> Result<Vec<GrowthRow>> {
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(d_list.len());
    let mut best_prev: Option<Candidate> = None;
    for (step, &d) in d_list.iter().enumerate() {
        let step_seed = seeding::mix(seed, step as u64);
        let mut best: Option<Candidate> = None;

        // Embedded candidate from the previous size, witness included.
        if let Some(prev) = &best_prev {
            let dp = prev.symbol.d();
            if d % dp == 0 {
                let symbol = block_embed_symbol(&prev.symbol, d / dp);
                let witness = block_embed_witness(&prev.witness, d);
                let ratio = witness_ratio(&symbol, &witness)?;
                let refined = evaluate(grid, d, symbol, &witness, budget)?;
                let keep = if refined.ratio >= ratio {
                    refined
                } else {
                    Candidate {
                        symbol: block_embed_symbol(&prev.symbol, d / dp),
                        witness,
                        ratio,
                        iterations: refined.iterations,
                        residual: refined.residual,
                    }
                };
                best = Some(keep);
            }
        }

        // Structured candidates: scale ladders in both orientations.
        if d > 1 {
            for (which, up) in [(0u64, true), (1, false)] {
                let symbol = normalize_symbol(ladder_symbol(grid, d, up))?;
                let start = random_field(
                    grid,
                    d,
                    seeding::named(seeding::mix(step_seed, 7_000 + which), "ladder-start"),
                );
                let cand = evaluate(grid, d, symbol, &start, budget)?;
                if best.as_ref().is_none_or(|b| cand.ratio > b.ratio) {
                    best = Some(cand);
                }
            }
        }

        // Random candidates, plus strictly upper-triangular ones: triangular
        // truncation is the known mechanism behind dimension growth, so the
        // pool should contain symbols of that shape.
        for i in 0..budget.random_candidates {
            let s = seeding::mix(step_seed, u64::from(i));
            let mut symbols = vec![random_field(grid, d, seeding::named(s, "growth-symbol"))];
            if d > 1 {
                let mut tri = random_field(grid, d, seeding::named(s, "growth-triangular"));
                for cell in 0..grid.cells() {
                    let m = tri.cell_mut(cell);
                    for r in 0..d {
                        for c in 0..=r {
                            m[(r, c)] = num_complex::Complex64::ZERO;
                        }
                    }
                }
                symbols.push(tri);
            }
            for (which, raw) in symbols.into_iter().enumerate() {
                let symbol = normalize_symbol(raw)?;
                let start = random_field(
                    grid,
                    d,
                    seeding::named(seeding::mix(s, which as u64), "growth-start"),
                );
                let cand = evaluate(grid, d, symbol, &start, budget)?;
                if best.as_ref().is_none_or(|b| cand.ratio > b.ratio) {
                    best = Some(cand);
                }
            }
        }

        // Local perturbations of the incumbent.
        for i in 0..budget.perturbations {
            let incumbent = best.as_ref().expect("candidate pool nonempty");
            let s = seeding::mix(step_seed, 1_000 + u64::from(i));
            let noise = random_field(grid, d, seeding::named(s, "growth-noise"))
                .scale(Complex64::new(0.25, 0.0));
            let symbol = normalize_symbol(incumbent.symbol.add(&noise)?)?;
            let start = incumbent.witness.clone();
            let cand = evaluate(grid, d, symbol, &start, budget)?;
            if cand.ratio > incumbent.ratio {
                best = Some(cand);
            }
        }

        let best = best.expect("candidate pool nonempty");
        rows.push(GrowthRow {
            d,
            ratio: best.ratio,
            seed: step_seed,
            iterations: best.iterations,
            residual: best.residual,
        });
        best_prev = Some(best);
    }
    Ok(rows)
}
