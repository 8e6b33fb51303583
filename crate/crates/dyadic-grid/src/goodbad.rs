use num_bigint::BigUint;
use rayon::prelude::*;

use crate::cube::DyadicCube;
use crate::error::GridError;
use crate::seeding;
use crate::shift::ShiftStream;
use crate::Result;

/// Parameters of the good/bad classification.
///
/// A cube `I` is bad when `dist(I, J^c) <= l(I)^gamma l(J)^(1-gamma)` for some
/// ancestor `J = I^(k)`, `r <= k <= k_max`. Distances use the infinity metric
/// on the torus, from the closure of `I` to the complement of `J`, and the
/// inequality is decided in exact integer arithmetic. `gamma` is kept as a
/// rational `p/q` so that thresholds have exact integer form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoodBadParams {
    pub r: u32,
    /// gamma = gamma_num / gamma_den, in (0,1).
    pub gamma_num: u32,
    pub gamma_den: u32,
    /// Badness is tested for ancestor steps r..=k_max only.
    pub k_max: u32,
}

impl GoodBadParams {
    pub fn new(r: u32, gamma_num: u32, gamma_den: u32, k_max: u32) -> Result<Self> {
        if r == 0 {
            return Err(GridError::InvalidParams {
                reason: "r must be positive".into(),
            });
        }
        if gamma_num == 0 || gamma_num >= gamma_den {
            return Err(GridError::InvalidParams {
                reason: "gamma must lie strictly between 0 and 1".into(),
            });
        }
        if k_max < r {
            return Err(GridError::InvalidParams {
                reason: format!("k_max = {k_max} must be at least r = {r}"),
            });
        }
        Ok(GoodBadParams {
            r,
            gamma_num,
            gamma_den,
            k_max,
        })
    }

    /// Workspace default: (r, gamma, k_max) = (8, 1/2, 24).
    pub fn default_params() -> Self {
        GoodBadParams {
            r: 8,
            gamma_num: 1,
            gamma_den: 2,
            k_max: 24,
        }
    }

    pub fn gamma(&self) -> f64 {
        f64::from(self.gamma_num) / f64::from(self.gamma_den)
    }

    /// Largest integer `u` with `u <= 2^(k(1-gamma))`, decided exactly via
    /// `u^q <= 2^(k(q-p))`.
    pub fn badness_threshold(&self, k: u32) -> u64 {
        let q = self.gamma_den;
        let exp = k * (self.gamma_den - self.gamma_num);
        let bound = BigUint::from(1u8) << exp;
        // u <= 2^(exp/q): binary search on u^q <= 2^exp.
        let mut lo = 0u64;
        let mut hi = 1u64 << (exp / q + 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if BigUint::from(mid).pow(q) <= bound {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// The translation scale bound `M(m) = max(r, ceil((1-gamma)^-1 log2+ |m|))`,
    /// computed exactly: the ceiling is the least `M` with `2^(M(q-p)) >= |m|^q`.
    pub fn m_bound(&self, m_norm: u64) -> u32 {
        if m_norm <= 1 {
            return self.r;
        }
        let q = self.gamma_den;
        let qp = self.gamma_den - self.gamma_num;
        let target = BigUint::from(m_norm).pow(q);
        let mut m = 0u32;
        while (BigUint::from(1u8) << (m * qp)) < target {
            m += 1;
        }
        m.max(self.r)
    }
}

/// Geometric badness test for a single cube of a shifted system.
///
/// Ancestor steps run over `r..=min(k_max, level)`; the torus filtration has
/// no cubes above level 0, so deeper steps cannot be realized.
pub fn is_bad(cube: &DyadicCube, params: &GoodBadParams) -> Result<bool> {
    if let Some(st) = cube.shift() {
        if st.len() < cube.level() {
            return Err(GridError::InsufficientShiftDepth {
                needed: cube.level(),
                available: st.len(),
            });
        }
    }
    let k_hi = params.k_max.min(cube.level());
    let fine = cube
        .level()
        .max(cube.shift().map_or(0, |s| s.len()));
    let start_i = cube.left_endpoint_fine(fine)?;
    let cell = 1u64 << (fine - cube.level());
    let modulus = 1u128 << fine;
    for k in params.r..=k_hi {
        let ancestor = cube.ancestor(k)?;
        let start_j = ancestor.left_endpoint_fine(fine)?;
        let side_j = 1u64 << (k + fine - cube.level());
        // Offsets in units of l(I), exact.
        let mut u_eff = u64::MAX;
        for c in 0..cube.dim() {
            let gap =
                ((start_i[c] as u128 + modulus - start_j[c] as u128) % modulus) as u64;
            debug_assert_eq!(gap % cell, 0);
            let u = gap / cell;
            let side_units = side_j / cell;
            u_eff = u_eff.min(u.min(side_units - 1 - u));
        }
        if u_eff <= params.badness_threshold(k) {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn is_good(cube: &DyadicCube, params: &GoodBadParams) -> Result<bool> {
    is_bad(cube, params).map(|b| !b)
}

/// Bit-level badness predicate for one dimension.
///
/// For a cube at level `j >= k_eff` with index `a` and shift bits
/// `beta_(j-k+1)..beta_j`, the offset inside the k-th ancestor is
/// `(a - v_k) mod 2^k` with `v_k` the k low bits read upward from level j.
/// Badness therefore depends only on `w = (a - v_K) mod 2^K`.
fn bad_from_offset_word(w: u64, params: &GoodBadParams, k_eff: u32, thresholds: &[u64]) -> bool {
    for k in params.r..=k_eff {
        let u = w & ((1u64 << k) - 1);
        let m = u.min((1u64 << k) - 1 - u);
        if m <= thresholds[k as usize] {
            return true;
        }
    }
    false
}

fn threshold_table(params: &GoodBadParams, k_hi: u32) -> Vec<u64> {
    (0..=k_hi).map(|k| params.badness_threshold(k)).collect()
}

/// Exact `pi_good` for one dimension by enumeration of all `2^k_eff` relative
/// offset words, with badness truncated to ancestor steps `r..=k_eff`.
pub fn pi_good_exact_1d_truncated(params: &GoodBadParams, k_eff: u32) -> f64 {
    let k_eff = k_eff.min(params.k_max);
    let thresholds = threshold_table(params, k_eff);
    let total = 1u64 << k_eff;
    let chunk = 1u64 << k_eff.min(16);
    let bad: u64 = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            (lo..hi)
                .filter(|&w| bad_from_offset_word(w, params, k_eff, &thresholds))
                .count() as u64
        })
        .sum();
    1.0 - bad as f64 / total as f64
}

/// Exact `pi_good` for one dimension at full depth `k_max`.
pub fn pi_good_exact_1d(params: &GoodBadParams) -> f64 {
    pi_good_exact_1d_truncated(params, params.k_max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiGoodEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Monte-Carlo estimate of `pi_good` in `dim` dimensions.
///
/// The reference cube sits at level `k_max` so every ancestor step in
/// `r..=k_max` is realized; the classification is invariant under the choice
/// of reference index. Sampling is reproducible: sample `i` draws its stream
/// from a seed derived from `(seed, i)`, so any thread partition yields the
/// same count.
pub fn estimate_pi_good(
    dim: usize,
    params: &GoodBadParams,
    samples: u64,
    seed: u64,
) -> Result<PiGoodEstimate> {
    if samples < 100 {
        return Err(GridError::InvalidParams {
            reason: "need at least 100 samples".into(),
        });
    }
    let level = params.k_max;
    let bad: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let stream = ShiftStream::sample(seeding::mix(seed, i), level, dim);
            let cube = DyadicCube::new(level, vec![0; dim], Some(stream))
                .expect("reference cube construction");
            u64::from(is_bad(&cube, params).expect("reference cube badness"))
        })
        .sum();
    let p_good = 1.0 - bad as f64 / samples as f64;
    let stderr = (p_good * (1.0 - p_good) / samples as f64).sqrt();
    Ok(PiGoodEstimate {
        estimate: p_good,
        stderr,
        samples,
    })
}

/// A sampled shift stream with its good/bad classification cached per level.
///
/// In one dimension, badness of a level-`j` cube depends only on the word
/// `(index - v) mod 2^k_eff`, where `v` collects the `k_eff` stream bits
/// read upward from level `j`, so one offset per level classifies every
/// cube of that level against a shared table.
pub struct ShiftSample {
    stream: std::sync::Arc<ShiftStream>,
    params: GoodBadParams,
    thresholds: Vec<u64>,
}

impl ShiftSample {
    pub fn new(stream: std::sync::Arc<ShiftStream>, params: GoodBadParams) -> Result<Self> {
        if stream.dim() != 1 {
            return Err(GridError::DimensionMismatch {
                expected: 1,
                got: stream.dim(),
            });
        }
        let thresholds = threshold_table(&params, params.k_max.min(stream.len()));
        Ok(ShiftSample {
            stream,
            params,
            thresholds,
        })
    }

    pub fn stream(&self) -> &std::sync::Arc<ShiftStream> {
        &self.stream
    }

    /// Classification of the cube with `index` at `level` in this stream's
    /// grid, via the cached offset-word predicate.
    pub fn is_bad(&self, level: u32, index: u64) -> Result<bool> {
        if self.stream.len() < level {
            return Err(GridError::InsufficientShiftDepth {
                needed: level,
                available: self.stream.len(),
            });
        }
        let k_eff = self.params.k_max.min(level);
        if k_eff < self.params.r {
            return Ok(false);
        }
        let v: u64 = (0..k_eff)
            .map(|l| u64::from(self.stream.bit(level - l, 0)) << l)
            .sum();
        let mask = (1u64 << k_eff) - 1;
        let w = index.wrapping_sub(v) & mask;
        Ok(bad_from_offset_word(w, &self.params, k_eff, &self.thresholds))
    }

    pub fn is_good(&self, level: u32, index: u64) -> Result<bool> {
        self.is_bad(level, index).map(|b| !b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecouplingReport {
    pub lhs: f64,
    pub rhs: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Monte-Carlo check of the good-cube decoupling identity in one dimension:
/// `pi_good * E_beta sum_I phi(I) = E_beta sum_{I good} phi(I)`.
///
/// Both sides are estimated with independent shift streams. On the finite
/// torus filtration the badness test truncates at `min(k_max, level)`, so the
/// left side weighs each support level by the exact `pi_good` of that
/// truncation; for a single-level functional this is the identity verbatim.
pub fn verify_good_decoupling(
    phi: &(dyn Fn(&DyadicCube) -> f64 + Sync),
    support_levels: &[u32],
    params: &GoodBadParams,
    samples: u64,
    seed: u64,
) -> Result<DecouplingReport> {
    if support_levels.is_empty() {
        return Err(GridError::InvalidParams {
            reason: "functional needs at least one support level".into(),
        });
    }
    let max_level = *support_levels.iter().max().unwrap();
    let pi_by_level: Vec<(u32, f64)> = support_levels
        .iter()
        .map(|&j| (j, pi_good_exact_1d_truncated(params, j.min(params.k_max))))
        .collect();

    let seed_lhs = seeding::named(seed, "decoupling-lhs");
    let seed_rhs = seeding::named(seed, "decoupling-rhs");

    let per_sample: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let stream_a = ShiftStream::sample(seeding::mix(seed_lhs, i), max_level, 1);
            let sample_b = ShiftSample::new(
                ShiftStream::sample(seeding::mix(seed_rhs, i), max_level, 1),
                *params,
            )
            .expect("one-dimensional stream");
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for &(j, pi_g) in &pi_by_level {
                for a in 0..(1u64 << j) {
                    let cube_a = DyadicCube::new(j, vec![a], Some(stream_a.clone()))
                        .expect("sum cube");
                    lhs += pi_g * phi(&cube_a);
                    if sample_b.is_good(j, a).expect("level within stream") {
                        let cube_b =
                            DyadicCube::new(j, vec![a], Some(sample_b.stream().clone()))
                                .expect("sum cube");
                        rhs += phi(&cube_b);
                    }
                }
            }
            (lhs, rhs)
        })
        .collect();

    let n = samples as f64;
    let mean_lhs = per_sample.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_rhs = per_sample.iter().map(|s| s.1).sum::<f64>() / n;
    let var_lhs = per_sample
        .iter()
        .map(|s| (s.0 - mean_lhs).powi(2))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let var_rhs = per_sample
        .iter()
        .map(|s| (s.1 - mean_rhs).powi(2))
        .sum::<f64>()
        / (n - 1.0).max(1.0);
    let stderr = ((var_lhs + var_rhs) / n).sqrt();
    Ok(DecouplingReport {
        lhs: mean_lhs,
        rhs: mean_rhs,
        stderr,
        samples,
    })
}
