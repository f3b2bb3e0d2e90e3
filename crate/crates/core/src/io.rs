//! Complex matrices as JSON: an array of rows, each entry `[re, im]`.

use std::path::Path;

use serde_json::Value;

use crate::error::{LquError, Result};
use crate::linalg::{c, CMatrix};

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| LquError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| LquError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses `[[[re, im], ...], ...]`. A bare number is accepted as a real entry.
pub fn matrix_from_value(v: &Value) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| LquError::InvalidMatrix("expected an array of rows".into()))?;
    let n = rows.len();
    if n == 0 {
        return Err(LquError::InvalidMatrix("matrix has no rows".into()));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| LquError::InvalidMatrix(format!("row {i} is not an array")))?;
        if row.len() != n {
            return Err(LquError::InvalidMatrix(format!(
                "matrix must be square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            data.push(
                entry_from_value(entry)
                    .ok_or_else(|| LquError::InvalidMatrix(format!("entry ({i},{j}) must be a number or [re, im]")))?,
            );
        }
    }
    Ok(CMatrix::from_row_slice(n, n, &data))
}

fn entry_from_value(v: &Value) -> Option<num_complex::Complex64> {
    if let Some(x) = v.as_f64() {
        return Some(c(x, 0.0));
    }
    match v.as_array()?.as_slice() {
        [re, im] => Some(c(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = read_file(path)?;
    let v: Value = serde_json::from_str(&text)?;
    matrix_from_value(&v).map_err(|e| match e {
        LquError::InvalidMatrix(msg) => LquError::InvalidMatrix(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    write_file(path, &serde_json::to_string_pretty(&matrix_to_value(m))?)
}
