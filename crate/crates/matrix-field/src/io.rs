//! Field containers: a little-endian binary format and a JSON text form.
//!
//! Binary layout: magic `MFLD1\n`; u32 header words (dim, levels, d,
//! grid kind); for shifted grids the stream as raw 0/1 bytes, level-major;
//! then one f64 (re, im) pair per matrix entry, row-major within each cell,
//! cells in flat index order.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use dyadic_grid::ShiftStream;

use crate::cmat::CMatrix;
use crate::error::FieldError;
use crate::field::MatrixField;
use crate::grid::GridSpec;
use crate::Result;

const MAGIC: &[u8; 6] = b"MFLD1\n";

fn io_err(e: std::io::Error) -> FieldError {
    FieldError::Serialization {
        reason: e.to_string(),
    }
}

pub fn write_binary<W: Write>(f: &MatrixField, w: &mut W) -> Result<()> {
    let grid = f.grid();
    w.write_all(MAGIC).map_err(io_err)?;
    for word in [
        grid.dim() as u32,
        grid.levels(),
        f.d() as u32,
        u32::from(grid.shift().is_some()),
    ] {
        w.write_all(&word.to_le_bytes()).map_err(io_err)?;
    }
    if let Some(stream) = grid.shift() {
        w.write_all(&stream.len().to_le_bytes()).map_err(io_err)?;
        for level in 1..=stream.len() {
            for c in 0..grid.dim() {
                w.write_all(&[stream.bit(level, c)]).map_err(io_err)?;
            }
        }
    }
    for cell in f.cells() {
        for i in 0..f.d() {
            for j in 0..f.d() {
                let z = cell[(i, j)];
                w.write_all(&z.re.to_le_bytes()).map_err(io_err)?;
                w.write_all(&z.im.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(r: &mut R) -> Result<MatrixField> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(FieldError::Serialization {
            reason: "bad magic".into(),
        });
    }
    let mut word = [0u8; 4];
    let mut next = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut word).map_err(io_err)?;
        Ok(u32::from_le_bytes(word))
    };
    let dim = next(r)? as usize;
    let levels = next(r)?;
    let d = next(r)? as usize;
    let kind = next(r)?;
    let grid = if kind == 1 {
        let len = next(r)?;
        let mut bits = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let mut row = vec![0u8; dim];
            r.read_exact(&mut row).map_err(io_err)?;
            bits.push(row);
        }
        let stream = ShiftStream::from_bits(bits)?;
        GridSpec::shifted(dim, levels, stream)?
    } else {
        GridSpec::standard(dim, levels)
    };
    let mut values = Vec::with_capacity(grid.cells());
    let mut buf = [0u8; 8];
    for _ in 0..grid.cells() {
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                r.read_exact(&mut buf).map_err(io_err)?;
                let re = f64::from_le_bytes(buf);
                r.read_exact(&mut buf).map_err(io_err)?;
                let im = f64::from_le_bytes(buf);
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        values.push(m);
    }
    MatrixField::from_cells(grid, d, values)
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    dim: usize,
    levels: u32,
    d: usize,
    /// One line per level, 0/1 characters per coordinate, as in the
    /// shift-stream text format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shift: Option<Vec<String>>,
    /// Row-major `[re, im]` entries per cell, cells in flat order.
    cells: Vec<Vec<[f64; 2]>>,
}

pub fn to_json_string(f: &MatrixField) -> Result<String> {
    let grid = f.grid();
    let shift = grid.shift().map(|s| {
        s.to_text()
            .lines()
            .map(str::to_owned)
            .collect::<Vec<String>>()
    });
    let cells = f
        .cells()
        .iter()
        .map(|m| m.iter_rows_then_cols())
        .collect();
    let doc = FieldJson {
        dim: grid.dim(),
        levels: grid.levels(),
        d: f.d(),
        shift,
        cells,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| FieldError::Serialization {
        reason: e.to_string(),
    })
}

trait RowMajor {
    fn iter_rows_then_cols(&self) -> Vec<[f64; 2]>;
}

impl RowMajor for CMatrix {
    fn iter_rows_then_cols(&self) -> Vec<[f64; 2]> {
        let d = self.nrows();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self[(i, j)];
                out.push([z.re, z.im]);
            }
        }
        out
    }
}

pub fn from_json_str(s: &str) -> Result<MatrixField> {
    let doc: FieldJson = serde_json::from_str(s).map_err(|e| FieldError::Serialization {
        reason: e.to_string(),
    })?;
    let grid = match &doc.shift {
        Some(lines) => {
            let stream = ShiftStream::from_text(&lines.join("\n"))?;
            GridSpec::shifted(doc.dim, doc.levels, stream)?
        }
        None => GridSpec::standard(doc.dim, doc.levels),
    };
    let values: Result<Vec<CMatrix>> = doc
        .cells
        .iter()
        .map(|entries| {
            if entries.len() != doc.d * doc.d {
                return Err(FieldError::Serialization {
                    reason: format!(
                        "cell holds {} entries, expected {}",
                        entries.len(),
                        doc.d * doc.d
                    ),
                });
            }
            let mut m = CMatrix::zeros(doc.d, doc.d);
            for i in 0..doc.d {
                for j in 0..doc.d {
                    let [re, im] = entries[i * doc.d + j];
                    m[(i, j)] = Complex64::new(re, im);
                }
            }
            Ok(m)
        })
        .collect();
    MatrixField::from_cells(grid, doc.d, values?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use proptest::prelude::*;

    #[test]
    fn binary_round_trip_shifted() {
        let stream = ShiftStream::sample(31, 4, 2);
        let grid = GridSpec::shifted(2, 4, stream).unwrap();
        let f = random_field(&grid, 3, 2);
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        let back = read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn json_round_trip() {
        let grid = GridSpec::standard(1, 2);
        let f = random_field(&grid, 2, 7);
        let s = to_json_string(&f).unwrap();
        let back = from_json_str(&s).unwrap();
        assert_eq!(f, back);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn binary_round_trip_random(seed in 0u64..500, levels in 0u32..4, d in 1usize..4) {
            let grid = GridSpec::standard(1, levels);
            let f = random_field(&grid, d, seed);
            let mut buf = Vec::new();
            write_binary(&f, &mut buf).unwrap();
            let back = read_binary(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(f, back);
        }
    }
}
