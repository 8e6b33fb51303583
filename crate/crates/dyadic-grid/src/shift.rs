use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GridError;
use crate::Result;

/// A finite random-shift stream `beta = (beta_j)_{j=1..len}`, `beta_j in {0,1}^n`.
///
/// The level-`j` lattice of the shifted system is the standard one translated
/// by `sum_{i=j+1..len} 2^-i beta_i` per coordinate, reduced modulo 1. Bits
/// beyond the stream length are zero, so the level-`len` lattice coincides
/// with the standard one as a point set (its cubes are only relabeled).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftStream {
    dim: usize,
    /// bits[j-1][c] is the level-j bit of coordinate c.
    bits: Vec<Vec<u8>>,
}

impl ShiftStream {
    /// Sample an i.i.d. uniform stream. Identical `(seed, l_max, dim)`
    /// reproduce the stream bit for bit.
    pub fn sample(seed: u64, l_max: u32, dim: usize) -> Arc<ShiftStream> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..l_max)
            .map(|_| (0..dim).map(|_| u8::from(rng.random::<bool>())).collect())
            .collect();
        Arc::new(ShiftStream { dim, bits })
    }

    /// The all-zero stream, i.e. the standard grid with explicit depth.
    pub fn zero(l_max: u32, dim: usize) -> Arc<ShiftStream> {
        Arc::new(ShiftStream {
            dim,
            bits: vec![vec![0; dim]; l_max as usize],
        })
    }

    pub fn from_bits(bits: Vec<Vec<u8>>) -> Result<Arc<ShiftStream>> {
        let dim = bits.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(GridError::MalformedStream {
                reason: "stream needs at least one level and one coordinate".into(),
            });
        }
        for row in &bits {
            if row.len() != dim {
                return Err(GridError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            if row.iter().any(|&b| b > 1) {
                return Err(GridError::MalformedStream {
                    reason: "bits must be 0 or 1".into(),
                });
            }
        }
        Ok(Arc::new(ShiftStream { dim, bits }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of levels carried by the stream.
    pub fn len(&self) -> u32 {
        self.bits.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The level-`level` bit of `coord` (levels are 1-based; levels beyond
    /// the stream are zero).
    pub fn bit(&self, level: u32, coord: usize) -> u8 {
        if level == 0 || level > self.len() {
            0
        } else {
            self.bits[(level - 1) as usize][coord]
        }
    }

    /// Offset of the level-`level` lattice, in fine cells of side
    /// `2^-fine_level`: `sum_{i=level+1..=min(len,fine_level)} 2^(fine_level-i) beta_i`.
    pub fn lattice_offset(&self, level: u32, fine_level: u32, coord: usize) -> u64 {
        let hi = fine_level.min(self.len());
        let mut off = 0u64;
        for i in (level + 1)..=hi {
            off += u64::from(self.bit(i, coord)) << (fine_level - i);
        }
        off
    }

    /// One line per level, one 0/1 character per coordinate.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.bits.len() * (self.dim + 1));
        for row in &self.bits {
            for &b in row {
                s.push(if b == 1 { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Arc<ShiftStream>> {
        let mut bits = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<u8>> = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(GridError::MalformedStream {
                        reason: format!("unexpected character {other:?}"),
                    }),
                })
                .collect();
            bits.push(row?);
        }
        Self::from_bits(bits)
    }
}
