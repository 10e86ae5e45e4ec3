//! JSON encodings shared by the certificate formats and the CLI.
//!
//! Complex numbers are `[re, im]`, matrices are lists of rows, exact
//! rationals are `"p/q"` strings.

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{CMatrix, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WireError {
    #[error("malformed JSON field `{0}`")]
    Field(String),
    #[error("invalid JSON: {0}")]
    Json(String),
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|&z| complex_json(z)).collect()))
            .collect(),
    )
}

/// Real parts only, as plain numbers.
pub fn real_matrix_json(m: &CMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i).iter().map(|z| z.re).collect::<Vec<_>>())).collect())
}

pub fn parse_complex(v: &Value, field: &str) -> Result<C64, WireError> {
    match v {
        Value::Number(x) => x.as_f64().map(|re| C64::new(re, 0.0)),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Some(C64::new(re, im)),
            _ => None,
        },
        _ => None,
    }
    .ok_or_else(|| WireError::Field(field.into()))
}

pub fn parse_matrix(v: &Value, field: &str) -> Result<CMatrix, WireError> {
    let rows = v.as_array().ok_or_else(|| WireError::Field(field.into()))?;
    let nrows = rows.len();
    let mut data = Vec::new();
    let mut ncols = None;
    for row in rows {
        let row = row.as_array().ok_or_else(|| WireError::Field(field.into()))?;
        if *ncols.get_or_insert(row.len()) != row.len() {
            return Err(WireError::Field(field.into()));
        }
        for z in row {
            data.push(parse_complex(z, field)?);
        }
    }
    CMatrix::from_vec(nrows, ncols.unwrap_or(0), data).map_err(|_| WireError::Field(field.into()))
}

pub fn parse_matrix_list(v: &Value, field: &str) -> Result<Vec<CMatrix>, WireError> {
    v.as_array()
        .ok_or_else(|| WireError::Field(field.into()))?
        .iter()
        .map(|m| parse_matrix(m, field))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.5), C64::new(0.0, -1.0), C64::new(0.25, 0.0), C64::new(3.0, 0.0)]).unwrap();
        assert_eq!(parse_matrix(&matrix_json(&m), "m").unwrap(), m);
        assert_eq!(parse_matrix(&json!([[1, [0, 1]]]), "m").unwrap()[(0, 1)], C64::new(0.0, 1.0));
        assert!(parse_matrix(&json!([[1], [1, 2]]), "m").is_err());
        assert!(parse_matrix(&json!([["x"]]), "m").is_err());
    }
}
