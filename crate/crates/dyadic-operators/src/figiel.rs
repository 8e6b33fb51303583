//! Figiel-style decomposition of the bilinear form `<<g, T f>>` into the
//! diagonal part A, translated off-diagonal parts B0 and C0, paraproduct
//! parts P and Q, and an explicit coarse correction; plus the translation
//! compatibility partition of good cubes.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use dyadic_grid::{goodbad, DyadicCube, GoodBadParams};
use matrix_field::cmat;
use matrix_field::haar::{haar_analyze, haar_basis_field, HaarSignature};
use matrix_field::{GridSpec, MatrixField};

use crate::error::OperatorError;
use crate::{FieldOperator, Result};

/// The five Figiel scalars with per-translation profiles and the coarse term.
///
/// The decomposition identity is
/// `a + b0 + p + c0 + q + coarse_correction = <<g, T f>>`,
/// with `total_pairing` holding the right side as computed directly.
#[derive(Debug, Clone)]
pub struct FigielReport {
    pub a: Complex64,
    pub b0: Complex64,
    pub p: Complex64,
    pub c0: Complex64,
    pub q: Complex64,
    pub coarse_correction: Complex64,
    pub total_pairing: Complex64,
    pub a_by_m: BTreeMap<Vec<i64>, Complex64>,
    pub b0_by_m: BTreeMap<Vec<i64>, Complex64>,
    pub c0_by_m: BTreeMap<Vec<i64>, Complex64>,
}

impl FigielReport {
    pub fn decomposition_sum(&self) -> Complex64 {
        self.a + self.b0 + self.p + self.c0 + self.q + self.coarse_correction
    }

    pub fn identity_residual(&self) -> f64 {
        (self.decomposition_sum() - self.total_pairing).norm()
    }

    /// Total mass at nonzero translations; identically zero for perfect
    /// dyadic operators.
    pub fn off_diagonal_mass(&self) -> f64 {
        let nonzero = |map: &BTreeMap<Vec<i64>, Complex64>| -> f64 {
            map.iter()
                .filter(|(m, _)| m.iter().any(|&c| c != 0))
                .map(|(_, v)| v.norm())
                .sum()
        };
        nonzero(&self.a_by_m) + nonzero(&self.b0_by_m) + nonzero(&self.c0_by_m)
    }
}

fn hs3(g: &cmat::CMatrix, mid: &cmat::CMatrix, f: &cmat::CMatrix) -> Complex64 {
    // tr(g* mid f)
    cmat::hs_inner(g, &(mid * f))
}

/// Compute the Figiel terms of `<<g, T f>>` for any field operator.
///
/// Brackets are evaluated by applying `T` to Haar basis fields, so structural
/// zeros of the operator (images supported inside the source cube) survive
/// exactly into the per-translation profiles.
pub fn figiel_terms(
    op: &dyn FieldOperator,
    f: &MatrixField,
    g: &MatrixField,
) -> Result<FigielReport> {
    f.check_same_shape(g)
        .map_err(|e| OperatorError::ShapeMismatch {
            reason: e.to_string(),
        })?;
    let grid = f.grid().clone();
    let d = f.d();
    let dim = grid.dim();

    let cf = haar_analyze(f);
    let cg = haar_analyze(g);
    let avgs_f = f.cube_averages();
    let avgs_g = g.cube_averages();

    let one = MatrixField::constant_identity(grid.clone(), d);
    let t1 = haar_analyze(&op.apply(&one)?);
    let tstar1_star = op.apply_adjoint(&one)?.adjoint();
    let c_ts = haar_analyze(&tstar1_star);

    let total_pairing = g.pairing(&op.apply(f)?)?;
    let coarse_correction = g
        .cond_expect(0)?
        .pairing(&op.apply(&f.cond_expect(0)?)?)?;

    let mut a = Complex64::ZERO;
    let mut b0 = Complex64::ZERO;
    let mut p = Complex64::ZERO;
    let mut c0 = Complex64::ZERO;
    let mut q_term = Complex64::ZERO;
    let mut a_by_m = BTreeMap::new();
    let mut b0_by_m = BTreeMap::new();
    let mut c0_by_m = BTreeMap::new();

    for j in 0..grid.levels() {
        let inv_cubes = 1.0 / grid.cubes_at(j) as f64; // |I| at this level... 2^(-jn)
        for src in 0..grid.cubes_at(j) {
            for theta in HaarSignature::nonzero(dim) {
                let fcoef = cf.coeff(j, src, theta);
                let basis = haar_basis_field(&grid, d, j, src, theta)?;
                let image = op.apply(&basis)?;
                let ci = haar_analyze(&image);
                let ai = image.cube_averages();

                // A: same-level brackets against difference functions.
                for dst in 0..grid.cubes_at(j) {
                    let m = grid.offset_centered(j, src, dst);
                    for eta in HaarSignature::nonzero(dim) {
                        let bracket = ci.coeff(j, dst, eta);
                        if cmat::max_abs_entry(bracket) == 0.0 {
                            continue;
                        }
                        let term = hs3(cg.coeff(j, dst, eta), bracket, fcoef);
                        a += term;
                        *a_by_m.entry(m.clone()).or_insert(Complex64::ZERO) += term;
                    }
                }

                // B0: brackets against (h0_dst - h0_src); the shared factor
                // |I| is an exact power of two.
                for dst in 0..grid.cubes_at(j) {
                    if dst == src {
                        continue;
                    }
                    let bracket = &ai[j as usize][dst];
                    if cmat::max_abs_entry(bracket) == 0.0 {
                        continue;
                    }
                    let m = grid.offset_centered(j, src, dst);
                    let gdiff = &avgs_g[j as usize][dst] - &avgs_g[j as usize][src];
                    let term = hs3(&gdiff, bracket, fcoef) * inv_cubes;
                    b0 += term;
                    *b0_by_m.entry(m).or_insert(Complex64::ZERO) += term;
                }

                // P: the paraproduct part carrying (T*1)*.
                p += hs3(
                    &avgs_g[j as usize][src],
                    c_ts.coeff(j, src, theta),
                    fcoef,
                );

                // Q: the paraproduct part carrying T1.
                q_term += hs3(
                    cg.coeff(j, src, theta),
                    t1.coeff(j, src, theta),
                    &avgs_f[j as usize][src],
                );
            }
        }

        // C0: apply T to the averaging functions of this level.
        let scale = (inv_cubes).sqrt(); // |K|^(1/2) normalization of <h0_K, f>
        for k_cube in 0..grid.cubes_at(j) {
            let h0 = haar_basis_field(&grid, d, j, k_cube, HaarSignature(0))?;
            let v = haar_analyze(&op.apply(&h0)?);
            for dst in 0..grid.cubes_at(j) {
                if dst == k_cube {
                    continue;
                }
                let m = grid.offset_centered(j, dst, k_cube);
                let fdiff = (&avgs_f[j as usize][k_cube] - &avgs_f[j as usize][dst])
                    * Complex64::new(scale, 0.0);
                for theta in HaarSignature::nonzero(dim) {
                    let bracket = v.coeff(j, dst, theta);
                    if cmat::max_abs_entry(bracket) == 0.0 {
                        continue;
                    }
                    let gcoef = cg.coeff(j, dst, theta);
                    let term = hs3(gcoef, bracket, &fdiff);
                    c0 += term;
                    *c0_by_m.entry(m.clone()).or_insert(Complex64::ZERO) += term;
                }
            }
        }
    }

    Ok(FigielReport {
        a,
        b0,
        p,
        c0,
        q: q_term,
        coarse_correction,
        total_pairing,
        a_by_m,
        b0_by_m,
        c0_by_m,
    })
}

/// The translation compatibility partition `D^m_(k,v)` of a family of good
/// cubes: `a(I) = log2 l(I) mod (M+1)` and `b(I)` alternating along orbits
/// of `I -> I + m l(I)`.
#[derive(Debug, Clone)]
pub struct CompatibilityPartition {
    pub m: Vec<i64>,
    pub m_bound: u32,
    /// `classes[k * 2 + v]` holds (level, cube) pairs.
    pub classes: Vec<Vec<(u32, usize)>>,
}

impl CompatibilityPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

fn orbit_parity(grid: &GridSpec, level: u32, cube: usize, m: &[i64]) -> u8 {
    // Walk the orbit of the translation, locate its canonical representative
    // (smallest flat index), and count steps from it to `cube`.
    let mut orbit = vec![cube];
    let mut cur = grid.translate(level, cube, m);
    while cur != cube {
        orbit.push(cur);
        cur = grid.translate(level, cur, m);
    }
    if orbit.len() == 1 {
        return 0;
    }
    debug_assert!(orbit.len() % 2 == 0, "orbit cycles on the torus are even");
    let rep_pos = orbit
        .iter()
        .enumerate()
        .min_by_key(|(_, &q)| q)
        .map(|(i, _)| i)
        .unwrap();
    // Steps from the representative forward to `cube` (position 0).
    let steps = (orbit.len() - rep_pos) % orbit.len();
    (steps % 2) as u8
}

pub fn compatibility_partition(
    grid: &Arc<GridSpec>,
    params: &GoodBadParams,
    m: &[i64],
    cubes: &[(u32, usize)],
) -> Result<CompatibilityPartition> {
    if m.len() != grid.dim() {
        return Err(OperatorError::ShapeMismatch {
            reason: format!("translation has {} coordinates, grid {}", m.len(), grid.dim()),
        });
    }
    let m_norm = m.iter().map(|&c| c.unsigned_abs()).max().unwrap_or(0);
    let m_bound = params.m_bound(m_norm);
    let mut classes = vec![Vec::new(); 2 * (m_bound as usize + 1)];
    for &(level, cube) in cubes {
        // a(I) = log2 l(I) mod (M+1) with log2 l(I) = -level.
        let a = (-(i64::from(level))).rem_euclid(i64::from(m_bound) + 1) as usize;
        let b = orbit_parity(grid, level, cube, m) as usize;
        classes[a * 2 + b].push((level, cube));
    }
    Ok(CompatibilityPartition {
        m: m.to_vec(),
        m_bound,
        classes,
    })
}

/// All good cubes of the grid between the given levels (inclusive).
pub fn good_cubes(
    grid: &Arc<GridSpec>,
    params: &GoodBadParams,
    min_level: u32,
    max_level: u32,
) -> Result<Vec<(u32, usize)>> {
    let mut out = Vec::new();
    for level in min_level..=max_level.min(grid.levels()) {
        for q in 0..grid.cubes_at(level) {
            let cube = grid.cube(level, q).map_err(OperatorError::Field)?;
            if goodbad::is_good(&cube, params)? {
                out.push((level, q));
            }
        }
    }
    Ok(out)
}

fn union_inside_strict_subcube(
    small: &DyadicCube,
    small_m: &DyadicCube,
    big: &DyadicCube,
) -> Result<bool> {
    if small.level() <= big.level() {
        return Ok(false);
    }
    if !small.contained_in(big)? || !small_m.contained_in(big)? {
        return Ok(false);
    }
    // Both must sit inside the same child of `big`.
    let k = small.level() - big.level() - 1;
    Ok(small.ancestor(k)? == small_m.ancestor(k)?)
}

/// The m-compatibility predicate for two cubes of one grid: the sets
/// `I u (I+m)` and `J u (J+m)` are disjoint, or one union is contained in a
/// strict dyadic subcube of `J` or `J+m` (or symmetrically).
pub fn m_compatible(
    grid: &Arc<GridSpec>,
    m: &[i64],
    first: (u32, usize),
    second: (u32, usize),
) -> Result<bool> {
    let to_cube = |(level, q): (u32, usize)| -> Result<(DyadicCube, DyadicCube)> {
        let c = grid.cube(level, q).map_err(OperatorError::Field)?;
        let cm = c.translate(m)?;
        Ok((c, cm))
    };
    let (i, im) = to_cube(first)?;
    let (j, jm) = to_cube(second)?;

    let mut disjoint = true;
    for x in [&i, &im] {
        for y in [&j, &jm] {
            if !x.disjoint_from(y)? {
                disjoint = false;
            }
        }
    }
    if disjoint {
        return Ok(true);
    }
    for big in [&j, &jm] {
        if union_inside_strict_subcube(&i, &im, big)? {
            return Ok(true);
        }
    }
    for big in [&i, &im] {
        if union_inside_strict_subcube(&j, &jm, big)? {
            return Ok(true);
        }
    }
    Ok(false)
}
