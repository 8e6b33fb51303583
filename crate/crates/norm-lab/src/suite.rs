//! Seeded ratio suites for norm inequalities.

use serde::{Deserialize, Serialize};

use dyadic_grid::seeding;
use matrix_field::MatrixField;

use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioStats {
    pub trials: u64,
    pub skipped: u64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub q90: f64,
    pub seed: u64,
}

/// Threshold below which `norm_in(f)` counts as degenerate and the trial is
/// skipped (and counted).
pub const DEGENERATE_NORM_TOL: f64 = 1e-14;

/// Run a seeded ratio suite: each trial draws `(T f, f)` from the family and
/// records `norm_out(Tf) / norm_in(f)`.
///
/// Trial `i` uses the derived seed `mix(seed, i)`, so the statistics record
/// is a pure function of `(family, seed, trials)`.
pub fn ratio_suite(
    family: &dyn Fn(u64) -> Result<(MatrixField, MatrixField)>,
    norm_in: &dyn Fn(&MatrixField) -> Result<f64>,
    norm_out: &dyn Fn(&MatrixField) -> Result<f64>,
    trials: u64,
    seed: u64,
) -> Result<RatioStats> {
    let mut ratios = Vec::with_capacity(trials as usize);
    let mut skipped = 0u64;
    for i in 0..trials {
        let (tf, f) = family(seeding::mix(seed, i))?;
        let denom = norm_in(&f)?;
        if denom <= DEGENERATE_NORM_TOL {
            skipped += 1;
            continue;
        }
        ratios.push(norm_out(&tf)? / denom);
    }
    if ratios.is_empty() {
        return Ok(RatioStats {
            trials,
            skipped,
            max: 0.0,
            mean: 0.0,
            median: 0.0,
            q90: 0.0,
            seed,
        });
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
    let quantile = |q: f64| -> f64 {
        let pos = (q * (sorted.len() - 1) as f64).round() as usize;
        sorted[pos.min(sorted.len() - 1)]
    };
    Ok(RatioStats {
        trials,
        skipped,
        max: *sorted.last().unwrap(),
        mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
        median: quantile(0.5),
        q90: quantile(0.9),
        seed,
    })
}
