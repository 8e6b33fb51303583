//! Operator manifests: a kind tag plus parameters, with field payloads in
//! the matrix-field JSON container form.

use serde::{Deserialize, Serialize};

use matrix_field::haar::{HaarCoefficients, HaarSignature};
use matrix_field::{io as field_io, MatrixField};

use crate::error::OperatorError;
use crate::perfect::PerfectDyadicCZO;
use crate::shift_op::DyadicShift;
use crate::tensor::{HaarIndex, HaarTensorOperator};
use crate::{FieldOperator, Result};

/// A dyadic operator specification: perfect-CZO triple, shift signs, or a
/// general Haar coefficient tensor.
#[derive(Debug, Clone)]
pub enum DyadicOperatorSpec {
    Perfect(PerfectDyadicCZO),
    Shift(DyadicShift),
    Tensor(HaarTensorOperator),
}

impl FieldOperator for DyadicOperatorSpec {
    fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        match self {
            DyadicOperatorSpec::Perfect(t) => t.apply(f),
            DyadicOperatorSpec::Shift(s) => s.apply(f),
            DyadicOperatorSpec::Tensor(t) => t.apply(f),
        }
    }

    fn apply_adjoint(&self, f: &MatrixField) -> Result<MatrixField> {
        match self {
            DyadicOperatorSpec::Perfect(t) => t.apply_adjoint(f),
            DyadicOperatorSpec::Shift(s) => s.apply_adjoint(f),
            DyadicOperatorSpec::Tensor(t) => t.apply_adjoint(f),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IndexJson {
    /// "avg" or "diff".
    kind: String,
    #[serde(default)]
    level: u32,
    #[serde(default)]
    cube: usize,
    #[serde(default)]
    theta: u32,
}

impl IndexJson {
    fn from(ix: HaarIndex) -> Self {
        match ix {
            HaarIndex::Average => IndexJson {
                kind: "avg".into(),
                level: 0,
                cube: 0,
                theta: 0,
            },
            HaarIndex::Diff { level, cube, theta } => IndexJson {
                kind: "diff".into(),
                level,
                cube,
                theta: theta.0,
            },
        }
    }

    fn into_index(self) -> Result<HaarIndex> {
        match self.kind.as_str() {
            "avg" => Ok(HaarIndex::Average),
            "diff" => Ok(HaarIndex::Diff {
                level: self.level,
                cube: self.cube,
                theta: HaarSignature(self.theta),
            }),
            other => Err(OperatorError::Serialization {
                reason: format!("unknown index kind {other:?}"),
            }),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    row: IndexJson,
    col: IndexJson,
    /// Row-major [re, im] pairs.
    matrix: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ManifestJson {
    PerfectCzo {
        /// xi entries as a tensor-entry list on the diagonal.
        xi: Vec<EntryJson>,
        b_col: serde_json::Value,
        b_row: serde_json::Value,
    },
    DyadicShift {
        dim: usize,
        levels: u32,
        signs: Vec<Vec<i8>>,
    },
    HaarTensor {
        dim: usize,
        levels: u32,
        d: usize,
        entries: Vec<EntryJson>,
    },
}

fn matrix_to_json(m: &matrix_field::CMatrix) -> Vec<[f64; 2]> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn matrix_from_json(d: usize, entries: &[[f64; 2]]) -> Result<matrix_field::CMatrix> {
    if entries.len() != d * d {
        return Err(OperatorError::Serialization {
            reason: format!("matrix payload holds {} entries, expected {}", entries.len(), d * d),
        });
    }
    let mut m = matrix_field::CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let [re, im] = entries[i * d + j];
            m[(i, j)] = num_complex::Complex64::new(re, im);
        }
    }
    Ok(m)
}

fn field_to_value(f: &MatrixField) -> Result<serde_json::Value> {
    let s = field_io::to_json_string(f).map_err(OperatorError::Field)?;
    serde_json::from_str(&s).map_err(|e| OperatorError::Serialization {
        reason: e.to_string(),
    })
}

fn field_from_value(v: &serde_json::Value) -> Result<MatrixField> {
    let s = serde_json::to_string(v).map_err(|e| OperatorError::Serialization {
        reason: e.to_string(),
    })?;
    field_io::from_json_str(&s).map_err(OperatorError::Field)
}

pub fn to_manifest(spec: &DyadicOperatorSpec) -> Result<String> {
    let doc = match spec {
        DyadicOperatorSpec::Perfect(t) => {
            let xi = t
                .xi()
                .iter()
                .map(|(level, cube, theta, m)| EntryJson {
                    row: IndexJson::from(HaarIndex::Diff { level, cube, theta }),
                    col: IndexJson::from(HaarIndex::Diff { level, cube, theta }),
                    matrix: matrix_to_json(m),
                })
                .collect();
            ManifestJson::PerfectCzo {
                xi,
                b_col: field_to_value(t.b_col())?,
                b_row: field_to_value(t.b_row())?,
            }
        }
        DyadicOperatorSpec::Shift(s) => ManifestJson::DyadicShift {
            dim: s.grid().dim(),
            levels: s.grid().levels(),
            signs: s.signs().to_vec(),
        },
        DyadicOperatorSpec::Tensor(t) => ManifestJson::HaarTensor {
            dim: t.grid().dim(),
            levels: t.grid().levels(),
            d: t.d(),
            entries: t
                .iter_entries()
                .map(|(&(row, col), m)| EntryJson {
                    row: IndexJson::from(row),
                    col: IndexJson::from(col),
                    matrix: matrix_to_json(m),
                })
                .collect(),
        },
    };
    serde_json::to_string_pretty(&doc).map_err(|e| OperatorError::Serialization {
        reason: e.to_string(),
    })
}

pub fn from_manifest(text: &str) -> Result<DyadicOperatorSpec> {
    let doc: ManifestJson = serde_json::from_str(text).map_err(|e| OperatorError::Serialization {
        reason: e.to_string(),
    })?;
    match doc {
        ManifestJson::PerfectCzo { xi, b_col, b_row } => {
            let b_col = field_from_value(&b_col)?;
            let b_row = field_from_value(&b_row)?;
            let d = b_col.d();
            let mut coeffs = HaarCoefficients::zero(b_col.grid().clone(), d);
            for e in xi {
                if let HaarIndex::Diff { level, cube, theta } = e.row.into_index()? {
                    *coeffs.coeff_mut(level, cube, theta) = matrix_from_json(d, &e.matrix)?;
                }
            }
            Ok(DyadicOperatorSpec::Perfect(PerfectDyadicCZO::new(
                coeffs, b_col, b_row,
            )?))
        }
        ManifestJson::DyadicShift { dim, levels, signs } => {
            let grid = matrix_field::GridSpec::standard(dim, levels);
            Ok(DyadicOperatorSpec::Shift(DyadicShift::from_signs(
                grid, signs,
            )?))
        }
        ManifestJson::HaarTensor {
            dim,
            levels,
            d,
            entries,
        } => {
            let grid = matrix_field::GridSpec::standard(dim, levels);
            let mut t = HaarTensorOperator::new(grid, d);
            for e in entries {
                t.set_entry(
                    e.row.into_index()?,
                    e.col.into_index()?,
                    matrix_from_json(d, &e.matrix)?,
                )?;
            }
            Ok(DyadicOperatorSpec::Tensor(t))
        }
    }
}
