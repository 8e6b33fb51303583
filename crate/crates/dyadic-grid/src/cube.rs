use std::sync::Arc;

use crate::error::GridError;
use crate::shift::ShiftStream;
use crate::Result;

/// A cube of a (possibly shifted) dyadic system on the n-torus.
///
/// Side length is `2^-level`; `index` has one component per coordinate, each
/// reduced modulo `2^level`. A cube with `shift: None` belongs to the
/// standard system; otherwise levels up to the stream length are realized.
#[derive(Debug, Clone)]
pub struct DyadicCube {
    dim: usize,
    level: u32,
    index: Vec<u64>,
    shift: Option<Arc<ShiftStream>>,
}

impl PartialEq for DyadicCube {
    fn eq(&self, other: &Self) -> bool {
        // Cubes compare as point sets within one grid: level + index,
        // plus pointer-or-value equality of the shift.
        self.dim == other.dim
            && self.level == other.level
            && self.index == other.index
            && match (&self.shift, &other.shift) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
                _ => false,
            }
    }
}

impl Eq for DyadicCube {}

impl DyadicCube {
    pub fn new(level: u32, index: Vec<u64>, shift: Option<Arc<ShiftStream>>) -> Result<Self> {
        let dim = index.len();
        if dim == 0 {
            return Err(GridError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if let Some(st) = &shift {
            if st.dim() != dim {
                return Err(GridError::DimensionMismatch {
                    expected: st.dim(),
                    got: dim,
                });
            }
            if st.len() < level {
                return Err(GridError::InsufficientShiftDepth {
                    needed: level,
                    available: st.len(),
                });
            }
        }
        for &i in &index {
            if level < 64 && i >= (1u64 << level) {
                return Err(GridError::IndexOutOfRange { index: i, level });
            }
        }
        Ok(DyadicCube {
            dim,
            level,
            index,
            shift,
        })
    }

    pub fn standard(level: u32, index: &[u64]) -> Result<Self> {
        Self::new(level, index.to_vec(), None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn shift(&self) -> Option<&Arc<ShiftStream>> {
        self.shift.as_ref()
    }

    /// log2 of the side length (always `-level`).
    pub fn side_log2(&self) -> i32 {
        -(self.level as i32)
    }

    /// log2 of the volume (`-level * dim`).
    pub fn volume_log2(&self) -> i32 {
        -(self.level as i32) * self.dim as i32
    }

    fn shift_bit(&self, level: u32, coord: usize) -> u64 {
        self.shift
            .as_ref()
            .map_or(0, |s| u64::from(s.bit(level, coord)))
    }

    /// Translation by `m` times the side length, modulo 1 per coordinate.
    pub fn translate(&self, m: &[i64]) -> Result<DyadicCube> {
        if m.len() != self.dim {
            return Err(GridError::DimensionMismatch {
                expected: self.dim,
                got: m.len(),
            });
        }
        let modulus = 1i128 << self.level;
        let index = self
            .index
            .iter()
            .zip(m)
            .map(|(&a, &mi)| ((a as i128 + mi as i128).rem_euclid(modulus)) as u64)
            .collect();
        Ok(DyadicCube {
            dim: self.dim,
            level: self.level,
            index,
            shift: self.shift.clone(),
        })
    }

    /// The dyadic parent within the same system.
    pub fn parent(&self) -> Result<DyadicCube> {
        self.ancestor(1)
    }

    /// The `k`-th dyadic ancestor within the same system.
    pub fn ancestor(&self, k: u32) -> Result<DyadicCube> {
        if k > self.level {
            return Err(GridError::AncestorOutOfRange {
                level: self.level,
                k,
            });
        }
        let mut level = self.level;
        let mut index = self.index.clone();
        for _ in 0..k {
            let modulus = 1u64 << level;
            for (c, a) in index.iter_mut().enumerate() {
                let b = self.shift_bit(level, c);
                *a = ((*a + modulus - b) % modulus) >> 1;
            }
            level -= 1;
        }
        Ok(DyadicCube {
            dim: self.dim,
            level,
            index,
            shift: self.shift.clone(),
        })
    }

    /// The child selected by one 0/1 corner bit per coordinate (0 = lower half).
    pub fn child(&self, corner: &[u8]) -> Result<DyadicCube> {
        if corner.len() != self.dim {
            return Err(GridError::DimensionMismatch {
                expected: self.dim,
                got: corner.len(),
            });
        }
        let level = self.level + 1;
        if let Some(st) = &self.shift {
            if st.len() < level {
                return Err(GridError::InsufficientShiftDepth {
                    needed: level,
                    available: st.len(),
                });
            }
        }
        let modulus = 1u64 << level;
        let index = self
            .index
            .iter()
            .enumerate()
            .map(|(c, &a)| (2 * a + self.shift_bit(level, c) + u64::from(corner[c])) % modulus)
            .collect();
        Ok(DyadicCube {
            dim: self.dim,
            level,
            index,
            shift: self.shift.clone(),
        })
    }

    /// Position of this cube within its parent: 0 for the lower half, 1 for
    /// the upper half, per coordinate.
    pub fn corner_in_parent(&self) -> Result<Vec<u8>> {
        if self.level == 0 {
            return Err(GridError::AncestorOutOfRange {
                level: 0,
                k: 1,
            });
        }
        Ok((0..self.dim)
            .map(|c| {
                let b = self.shift_bit(self.level, c);
                let modulus = 1u64 << self.level;
                (((self.index[c] + modulus - b) % modulus) & 1) as u8
            })
            .collect())
    }

    /// Left endpoint per coordinate, in units of `2^-fine_level`.
    pub fn left_endpoint_fine(&self, fine_level: u32) -> Result<Vec<u64>> {
        if fine_level < self.level {
            return Err(GridError::InsufficientShiftDepth {
                needed: self.level,
                available: fine_level,
            });
        }
        Ok((0..self.dim)
            .map(|c| {
                let base = self.index[c] << (fine_level - self.level);
                let off = self
                    .shift
                    .as_ref()
                    .map_or(0, |s| s.lattice_offset(self.level, fine_level, c));
                (base + off) & ((1u64.checked_shl(fine_level).unwrap_or(0)).wrapping_sub(1))
            })
            .collect())
    }

    /// Point-set containment on the torus (`self` inside `other`), exact.
    pub fn contained_in(&self, other: &DyadicCube) -> Result<bool> {
        if self.dim != other.dim {
            return Err(GridError::DimensionMismatch {
                expected: other.dim,
                got: self.dim,
            });
        }
        let fine = self
            .level
            .max(other.level)
            .max(self.shift.as_ref().map_or(0, |s| s.len()))
            .max(other.shift.as_ref().map_or(0, |s| s.len()));
        let a = self.left_endpoint_fine(fine)?;
        let b = other.left_endpoint_fine(fine)?;
        let len_a = 1u64 << (fine - self.level);
        let len_b = 1u64 << (fine - other.level);
        let modulus = 1u128 << fine;
        Ok((0..self.dim).all(|c| {
            let gap = ((a[c] as u128 + modulus - b[c] as u128) % modulus) as u64;
            u128::from(gap) + u128::from(len_a) <= u128::from(len_b)
        }))
    }

    /// Point-set disjointness on the torus, exact.
    pub fn disjoint_from(&self, other: &DyadicCube) -> Result<bool> {
        let fine = self
            .level
            .max(other.level)
            .max(self.shift.as_ref().map_or(0, |s| s.len()))
            .max(other.shift.as_ref().map_or(0, |s| s.len()));
        let a = self.left_endpoint_fine(fine)?;
        let b = other.left_endpoint_fine(fine)?;
        let len_a = 1u128 << (fine - self.level);
        let len_b = 1u128 << (fine - other.level);
        let modulus = 1u128 << fine;
        // Disjoint iff they are disjoint in at least one coordinate.
        Ok((0..self.dim).any(|c| {
            let d_ab = (u128::from(a[c]) + modulus - u128::from(b[c])) % modulus;
            let d_ba = (u128::from(b[c]) + modulus - u128::from(a[c])) % modulus;
            d_ab >= len_b && d_ba >= len_a
        }))
    }
}
