//! Channel JSON serialization.
//!
//! The on-disk format is an object with `d_in`, `d_out`, and exactly one of:
//!
//! * `"kraus"`: a list of `d_out × d_in` matrices, each a flat row-major list
//!   of `[re, im]` pairs;
//! * `"choi"`: the Choi matrix as a list of rows, each a list of `[re, im]`
//!   pairs, of total size `(d_in·d_out)²`.
//!
//! Reading a `choi` payload rejects non-Hermitian matrices (the map would
//! not be Hermiticity-preserving); writing always emits the `choi` form.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

use super::{KrausSet, LinearMapRep};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    d_in: usize,
    d_out: usize,
    kraus: Option<Vec<Vec<[f64; 2]>>>,
    choi: Option<Vec<Vec<[f64; 2]>>>,
}

fn entries_to_matrix(rows: usize, cols: usize, flat: &[[f64; 2]]) -> Result<ComplexMatrix> {
    if flat.len() != rows * cols {
        return Err(Error::Parse(format!(
            "matrix payload has {} entries, expected {}×{} = {}",
            flat.len(),
            rows,
            cols,
            rows * cols
        )));
    }
    ComplexMatrix::from_rows(
        rows,
        cols,
        flat.iter().map(|[r, i]| Complex64::new(*r, *i)).collect(),
    )
}

/// Parse a channel/map from its JSON text representation.
pub fn channel_from_json(text: &str) -> Result<LinearMapRep> {
    let parsed: ChannelJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel JSON: {e}")))?;
    if parsed.d_in == 0 || parsed.d_out == 0 {
        return Err(Error::Parse("d_in and d_out must be positive".into()));
    }
    match (parsed.kraus, parsed.choi) {
        (Some(kraus), None) => {
            let ops = kraus
                .iter()
                .map(|flat| entries_to_matrix(parsed.d_out, parsed.d_in, flat))
                .collect::<Result<Vec<_>>>()?;
            LinearMapRep::from_kraus(&KrausSet::new(ops)?)
        }
        (None, Some(choi)) => {
            let n = parsed.d_in * parsed.d_out;
            if choi.len() != n {
                return Err(Error::Parse(format!(
                    "choi payload has {} rows, expected {n}",
                    choi.len()
                )));
            }
            let mut flat = Vec::with_capacity(n * n);
            for row in &choi {
                if row.len() != n {
                    return Err(Error::Parse(format!(
                        "choi row has {} entries, expected {n}",
                        row.len()
                    )));
                }
                flat.extend_from_slice(row);
            }
            let mat = entries_to_matrix(n, n, &flat)?;
            LinearMapRep::from_choi(HermitianOperator::new(mat)?, parsed.d_in, parsed.d_out)
        }
        (Some(_), Some(_)) => Err(Error::Parse(
            "channel JSON must contain exactly one of 'kraus' or 'choi', not both".into(),
        )),
        (None, None) => Err(Error::Parse(
            "channel JSON must contain one of 'kraus' or 'choi'".into(),
        )),
    }
}

/// Serialize a map to the JSON value form (Choi representation).
pub fn channel_to_json(map: &LinearMapRep) -> Value {
    let n = map.d_in() * map.d_out();
    let rows: Vec<Value> = (0..n)
        .map(|i| {
            let row: Vec<Value> = (0..n)
                .map(|j| {
                    let z = map.choi().at(i, j);
                    json!([z.re, z.im])
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    json!({
        "d_in": map.d_in(),
        "d_out": map.d_out(),
        "choi": rows,
    })
}
