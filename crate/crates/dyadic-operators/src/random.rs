//! Seeded random operator instances for experiments and audits.

use std::sync::Arc;

use dyadic_grid::seeding;
use matrix_field::cmat;
use matrix_field::haar::{HaarCoefficients, HaarSignature};
use matrix_field::random::{random_field, rng_from_seed};
use matrix_field::GridSpec;
use rand::Rng;

use crate::perfect::PerfectDyadicCZO;
use crate::shift_op::DyadicShift;
use crate::tensor::{HaarIndex, HaarTensorOperator};

/// Random perfect dyadic CZO; `symmetric` forces `(T1)* = T*1` by reusing the
/// column symbol.
pub fn random_perfect_czo(
    grid: &Arc<GridSpec>,
    d: usize,
    seed: u64,
    symmetric: bool,
) -> PerfectDyadicCZO {
    let mut rng = rng_from_seed(seeding::named(seed, "perfect-xi"));
    let mut xi = HaarCoefficients::zero(grid.clone(), d);
    for j in 0..grid.levels() {
        for q in 0..grid.cubes_at(j) {
            for theta in HaarSignature::nonzero(grid.dim()) {
                *xi.coeff_mut(j, q, theta) = cmat::random_gaussian(d, &mut rng);
            }
        }
    }
    let b_col = random_field(grid, d, seeding::named(seed, "perfect-bcol"));
    let b_row = if symmetric {
        b_col.clone()
    } else {
        random_field(grid, d, seeding::named(seed, "perfect-brow"))
    };
    PerfectDyadicCZO::new(xi, b_col, b_row).expect("matching shapes by construction")
}

/// Random Haar tensor with same-level entries within translation band
/// `|m| <= band` per coordinate, plus random average row and column.
pub fn random_banded_tensor(
    grid: &Arc<GridSpec>,
    d: usize,
    band: i64,
    seed: u64,
) -> HaarTensorOperator {
    let mut rng = rng_from_seed(seeding::named(seed, "banded-tensor"));
    let mut t = HaarTensorOperator::new(grid.clone(), d);
    let dim = grid.dim();
    for j in 0..grid.levels() {
        let width = 1i64 << j;
        for q in 0..grid.cubes_at(j) {
            for theta in HaarSignature::nonzero(dim) {
                let col = HaarIndex::Diff {
                    level: j,
                    cube: q,
                    theta,
                };
                // Translates within the band (clipped to the level's extent).
                let reach = band.min(width / 2);
                let mut m = vec![-reach; dim];
                loop {
                    let target = grid.translate(j, q, &m);
                    for eta in HaarSignature::nonzero(dim) {
                        let row = HaarIndex::Diff {
                            level: j,
                            cube: target,
                            theta: eta,
                        };
                        t.add_to_entry(row, col, cmat::random_gaussian(d, &mut rng))
                            .expect("indices in range");
                    }
                    // odometer over m in [-reach, reach]^dim
                    let mut c = 0;
                    loop {
                        if c == dim {
                            break;
                        }
                        m[c] += 1;
                        if m[c] <= reach {
                            break;
                        }
                        m[c] = -reach;
                        c += 1;
                    }
                    if c == dim {
                        break;
                    }
                }
                // Sparse average row/column entries.
                if rng.random::<f64>() < 0.5 {
                    t.add_to_entry(HaarIndex::Average, col, cmat::random_gaussian(d, &mut rng))
                        .expect("in range");
                }
                if rng.random::<f64>() < 0.5 {
                    t.add_to_entry(col, HaarIndex::Average, cmat::random_gaussian(d, &mut rng))
                        .expect("in range");
                }
            }
        }
    }
    t.add_to_entry(
        HaarIndex::Average,
        HaarIndex::Average,
        cmat::random_gaussian(d, &mut rng),
    )
    .expect("in range");
    t
}

/// Dyadic shift with independent uniform signs.
pub fn random_shift(grid: &Arc<GridSpec>, seed: u64) -> DyadicShift {
    let mut rng = rng_from_seed(seeding::named(seed, "shift-signs"));
    DyadicShift::from_fn(grid.clone(), |_, _, _| {
        if rng.random::<bool>() {
            1
        } else {
            -1
        }
    })
}
