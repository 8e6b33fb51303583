//! Binding of a dyadic system to a finite resolution.

use std::sync::Arc;

use dyadic_grid::{DyadicCube, ShiftStream};

use crate::error::FieldError;
use crate::Result;

/// A dyadic system (standard or shifted) realized at levels `0..=levels` on
/// the `dim`-torus.
///
/// Shift streams are truncated at the finest level, so the level-`levels`
/// lattice of every realized system coincides with the standard fine lattice
/// as a point set; only cube labels differ. Fields can therefore be re-bound
/// to any grid of the same shape without touching cell data.
#[derive(Debug, Clone)]
pub struct GridSpec {
    dim: usize,
    levels: u32,
    shift: Option<Arc<ShiftStream>>,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.levels == other.levels
            && match (&self.shift, &other.shift) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
                _ => false,
            }
    }
}

impl GridSpec {
    pub fn standard(dim: usize, levels: u32) -> Arc<GridSpec> {
        assert!(dim >= 1, "dimension must be positive");
        assert!(
            (levels as usize) * dim < 40,
            "resolution too fine: 2^(levels*dim) cells would not fit"
        );
        Arc::new(GridSpec {
            dim,
            levels,
            shift: None,
        })
    }

    pub fn shifted(dim: usize, levels: u32, stream: Arc<ShiftStream>) -> Result<Arc<GridSpec>> {
        if stream.dim() != dim {
            return Err(FieldError::ShapeMismatch {
                reason: format!(
                    "shift stream has dimension {}, grid has {}",
                    stream.dim(),
                    dim
                ),
            });
        }
        if stream.len() > levels {
            return Err(FieldError::ShapeMismatch {
                reason: format!(
                    "shift stream carries {} levels but the grid realizes only {}; \
                     sub-cell shifts would break cell alignment",
                    stream.len(),
                    levels
                ),
            });
        }
        assert!((levels as usize) * dim < 40);
        Ok(Arc::new(GridSpec {
            dim,
            levels,
            shift: Some(stream),
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn shift(&self) -> Option<&Arc<ShiftStream>> {
        self.shift.as_ref()
    }

    /// Number of finest-level cells, `2^(levels*dim)`.
    pub fn cells(&self) -> usize {
        1usize << (self.levels as usize * self.dim)
    }

    /// Number of cubes at `level`.
    pub fn cubes_at(&self, level: u32) -> usize {
        1usize << (level as usize * self.dim)
    }

    /// Corners of a cube, `2^dim` of them; bit `c` selects the upper half in
    /// coordinate `c`.
    pub fn corners(&self) -> usize {
        1usize << self.dim
    }

    /// Offset of the level-`level` lattice in fine cells, per coordinate.
    pub fn delta(&self, level: u32, coord: usize) -> u64 {
        self.shift
            .as_ref()
            .map_or(0, |s| s.lattice_offset(level, self.levels, coord))
    }

    fn unpack(&self, width: u32, flat: usize) -> Vec<u64> {
        let mask = (1u64 << width) - 1;
        (0..self.dim)
            .map(|c| ((flat as u64) >> (width as usize * (self.dim - 1 - c))) & mask)
            .collect()
    }

    fn pack(&self, width: u32, coords: &[u64]) -> usize {
        let mut flat = 0u64;
        for &a in coords {
            flat = (flat << width) | a;
        }
        flat as usize
    }

    /// Flat index of the child of cube `flat` (at `level`) in corner `t`.
    pub fn child(&self, level: u32, flat: usize, corner: usize) -> usize {
        let coords = self.unpack(level, flat);
        let child_level = level + 1;
        let mask = (1u64 << child_level) - 1;
        let child: Vec<u64> = coords
            .iter()
            .enumerate()
            .map(|(c, &a)| {
                let bit = self
                    .shift
                    .as_ref()
                    .map_or(0, |s| u64::from(s.bit(child_level, c)));
                let t = (corner >> (self.dim - 1 - c)) as u64 & 1;
                (2 * a + bit + t) & mask
            })
            .collect();
        self.pack(child_level, &child)
    }

    /// Flat index of the parent of cube `flat` at `level >= 1`.
    pub fn parent(&self, level: u32, flat: usize) -> usize {
        assert!(level >= 1, "level-0 cube has no parent");
        let coords = self.unpack(level, flat);
        let modulus = 1u64 << level;
        let parent: Vec<u64> = coords
            .iter()
            .enumerate()
            .map(|(c, &a)| {
                let bit = self
                    .shift
                    .as_ref()
                    .map_or(0, |s| u64::from(s.bit(level, c)));
                ((a + modulus - bit) & (modulus - 1)) >> 1
            })
            .collect();
        self.pack(level - 1, &parent)
    }

    /// Corner of cube `flat` within its parent, as a bitmask (bit `c` set when
    /// the cube sits in the upper half of coordinate `c`).
    pub fn corner_of(&self, level: u32, flat: usize) -> usize {
        assert!(level >= 1, "level-0 cube has no parent");
        let coords = self.unpack(level, flat);
        let modulus = 1u64 << level;
        let mut corner = 0usize;
        for (c, &a) in coords.iter().enumerate() {
            let bit = self
                .shift
                .as_ref()
                .map_or(0, |s| u64::from(s.bit(level, c)));
            let t = ((a + modulus - bit) & 1) as usize;
            corner |= t << (self.dim - 1 - c);
        }
        corner
    }

    /// Flat index of the translate `I + m * l(I)` of cube `flat`.
    pub fn translate(&self, level: u32, flat: usize, m: &[i64]) -> usize {
        assert_eq!(m.len(), self.dim);
        let coords = self.unpack(level, flat);
        let modulus = 1i128 << level;
        let out: Vec<u64> = coords
            .iter()
            .zip(m)
            .map(|(&a, &mi)| ((a as i128 + i128::from(mi)).rem_euclid(modulus)) as u64)
            .collect();
        self.pack(level, &out)
    }

    /// Translation vector from cube `from` to cube `to` at the same level,
    /// with centered representatives in `(-2^(level-1), 2^(level-1)]`.
    pub fn offset_centered(&self, level: u32, from: usize, to: usize) -> Vec<i64> {
        let a = self.unpack(level, from);
        let b = self.unpack(level, to);
        let modulus = 1i64 << level;
        a.iter()
            .zip(&b)
            .map(|(&x, &y)| {
                let mut d = (y as i64 - x as i64).rem_euclid(modulus);
                if d > modulus / 2 {
                    d -= modulus;
                }
                d
            })
            .collect()
    }

    /// Flat index of the level-`level` cube containing a fine cell.
    pub fn cube_of_cell(&self, level: u32, cell: usize) -> usize {
        let coords = self.unpack(self.levels, cell);
        let mask = (1u64 << self.levels) - 1;
        let cube: Vec<u64> = coords
            .iter()
            .enumerate()
            .map(|(c, &x)| {
                let d = self.delta(level, c);
                ((x + (mask + 1) - d) & mask) >> (self.levels - level)
            })
            .collect();
        self.pack(level, &cube)
    }

    /// Flat indices of all fine cells of a cube, in lexicographic coordinate
    /// order with wraparound.
    pub fn cells_of_cube(&self, level: u32, flat: usize) -> Vec<usize> {
        let coords = self.unpack(level, flat);
        let span = 1u64 << (self.levels - level);
        let mask = (1u64 << self.levels) - 1;
        let per_coord: Vec<Vec<u64>> = coords
            .iter()
            .enumerate()
            .map(|(c, &a)| {
                let start = ((a << (self.levels - level)) + self.delta(level, c)) & mask;
                (0..span).map(|s| (start + s) & mask).collect()
            })
            .collect();
        let mut out = Vec::with_capacity((span as usize).pow(self.dim as u32));
        let mut idx = vec![0usize; self.dim];
        loop {
            let coord: Vec<u64> = (0..self.dim).map(|c| per_coord[c][idx[c]]).collect();
            out.push(self.pack(self.levels, &coord));
            let mut c = self.dim;
            loop {
                if c == 0 {
                    return out;
                }
                c -= 1;
                idx[c] += 1;
                if idx[c] < per_coord[c].len() {
                    break;
                }
                idx[c] = 0;
            }
        }
    }

    /// The cube as a [`DyadicCube`] of the underlying system.
    pub fn cube(&self, level: u32, flat: usize) -> Result<DyadicCube> {
        let coords = self.unpack(level, flat);
        Ok(DyadicCube::new(level, coords, self.shift.clone())?)
    }

    /// Rebind the same resolution to a different (or no) shift stream.
    pub fn with_shift(
        self: &Arc<Self>,
        stream: Option<Arc<ShiftStream>>,
    ) -> Result<Arc<GridSpec>> {
        match stream {
            None => Ok(GridSpec::standard(self.dim, self.levels)),
            Some(s) => GridSpec::shifted(self.dim, self.levels, s),
        }
    }

    /// Same resolution and dimension (cell data interchangeable).
    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.dim == other.dim && self.levels == other.levels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyadic_grid::ShiftStream;

    #[test]
    fn cells_of_cube_partition_standard() {
        let g = GridSpec::standard(2, 3);
        for level in 0..=3 {
            let mut seen = vec![false; g.cells()];
            for q in 0..g.cubes_at(level) {
                for cell in g.cells_of_cube(level, q) {
                    assert!(!seen[cell]);
                    seen[cell] = true;
                    assert_eq!(g.cube_of_cell(level, cell), q);
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn cells_of_cube_partition_shifted() {
        let stream = ShiftStream::sample(17, 4, 2);
        let g = GridSpec::shifted(2, 4, stream).unwrap();
        for level in 0..=4 {
            let mut seen = vec![false; g.cells()];
            for q in 0..g.cubes_at(level) {
                for cell in g.cells_of_cube(level, q) {
                    assert!(!seen[cell]);
                    seen[cell] = true;
                    assert_eq!(g.cube_of_cell(level, cell), q);
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn parent_and_corner_invert_child() {
        let stream = ShiftStream::sample(41, 4, 2);
        let g = GridSpec::shifted(2, 4, stream).unwrap();
        for level in 0..4 {
            for q in 0..g.cubes_at(level) {
                for t in 0..g.corners() {
                    let ch = g.child(level, q, t);
                    assert_eq!(g.parent(level + 1, ch), q);
                    assert_eq!(g.corner_of(level + 1, ch), t);
                }
            }
        }
    }

    #[test]
    fn centered_offsets_invert_translation() {
        let g = GridSpec::standard(1, 4);
        // Centered representatives live in (-4, 4] at level 3.
        for q in 0..g.cubes_at(3) {
            for m in -3i64..=4 {
                let t = g.translate(3, q, &[m]);
                assert_eq!(g.offset_centered(3, q, t), vec![m]);
            }
        }
    }

    #[test]
    fn children_tile_parent() {
        let stream = ShiftStream::sample(23, 5, 1);
        let g = GridSpec::shifted(1, 5, stream).unwrap();
        for level in 0..5 {
            for q in 0..g.cubes_at(level) {
                let mut cells: Vec<usize> = (0..g.corners())
                    .flat_map(|t| g.cells_of_cube(level + 1, g.child(level, q, t)))
                    .collect();
                cells.sort_unstable();
                let mut expect = g.cells_of_cube(level, q);
                expect.sort_unstable();
                assert_eq!(cells, expect);
            }
        }
    }
}
