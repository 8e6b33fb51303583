//! Seeded random fields and symbols used by experiments and test suites.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cmat::{self, CMatrix};
use crate::field::MatrixField;
use crate::grid::GridSpec;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Field with i.i.d. complex Gaussian entries per cell.
pub fn random_field(grid: &Arc<GridSpec>, d: usize, seed: u64) -> MatrixField {
    let mut rng = rng_from_seed(seed);
    let values = (0..grid.cells())
        .map(|_| cmat::random_gaussian(d, &mut rng))
        .collect();
    MatrixField::from_cells(grid.clone(), d, values).expect("generated cells match grid")
}

/// Self-adjoint random field (`f = f*` pointwise).
pub fn random_self_adjoint_field(grid: &Arc<GridSpec>, d: usize, seed: u64) -> MatrixField {
    let f = random_field(grid, d, seed);
    f.add(&f.adjoint())
        .expect("same shape")
        .scale(Complex64::new(0.5, 0.0))
}

/// An adapted sequence `xi_0..xi_(levels-1)`: `xi_k` is level-`k` measurable.
pub fn random_adapted_sequence(grid: &Arc<GridSpec>, d: usize, seed: u64) -> Vec<MatrixField> {
    (0..grid.levels())
        .map(|k| {
            random_field(grid, d, dyadic_grid::seeding::mix(seed, u64::from(k)))
                .cond_expect(k)
                .expect("level within range")
        })
        .collect()
}

/// An adapted sequence whose value on every level-`k` cube is unitary.
pub fn random_unitary_adapted_sequence(
    grid: &Arc<GridSpec>,
    d: usize,
    seed: u64,
) -> Vec<MatrixField> {
    let mut rng = rng_from_seed(seed);
    (0..grid.levels())
        .map(|k| {
            let mut f = MatrixField::zero(grid.clone(), d);
            for q in 0..grid.cubes_at(k) {
                let u = cmat::random_unitary(d, &mut rng);
                for cell in grid.cells_of_cube(k, q) {
                    *f.cell_mut(cell) = u.clone();
                }
            }
            f
        })
        .collect()
}

/// A random constant matrix, for modular-law style tests.
pub fn random_constant(d: usize, seed: u64) -> CMatrix {
    cmat::random_gaussian(d, &mut rng_from_seed(seed))
}
