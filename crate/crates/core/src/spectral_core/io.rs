//! Matrix CSV: `n` lines of `n` comma-separated decimals, no header.
//! Values are written with 17 significant digits so they round-trip exactly.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::{SymMatrix, Vector};
use crate::error::{Error, Result};

/// 17 significant digits in scientific notation; parses back bit-exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_rows(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_error(path, idx + 1, format!("`{}`: {e}", f.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<SymMatrix> {
    let text = fs::read_to_string(path)?;
    let rows = parse_rows(path, &text)?;
    let n = rows.len();
    if n == 0 {
        return Err(parse_error(path, 1, "empty matrix file"));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(parse_error(
                path,
                i + 1,
                format!("expected {n} fields, found {}", r.len()),
            ));
        }
    }
    SymMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn write_matrix_csv(path: &Path, m: &SymMatrix) -> Result<()> {
    let n = m.n();
    let mut out = String::with_capacity(n * n * 25);
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parses a vector written either as one comma-separated line or one value
/// per line.
pub fn parse_vector(path: &Path, text: &str) -> Result<Vector> {
    let values: Vec<f64> = parse_rows(path, text)?.into_iter().flatten().collect();
    if values.is_empty() {
        return Err(parse_error(path, 1, "empty vector"));
    }
    Ok(Vector::from_vec(values))
}

pub fn read_vector_file(path: &Path) -> Result<Vector> {
    let text = fs::read_to_string(path)?;
    parse_vector(path, &text)
}

pub fn write_vector_file(path: &Path, v: &Vector) -> Result<()> {
    let fields: Vec<String> = v.iter().map(|x| format_f64(*x)).collect();
    fs::write(path, fields.join(",") + "\n")?;
    Ok(())
}
