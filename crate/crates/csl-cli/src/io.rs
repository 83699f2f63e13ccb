//! CSV and label-file input/output.
//!
//! Matrix files are comma-separated decimal text, one data point per row, no
//! header unless the command is told one is present. Numbers are written with
//! 17 significant digits so files round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use csl_core::Matrix;
use csl_core::Subspace;

use crate::errors::{CliError, CliResult};

/// Formats an f64 with 17 significant digits (round-trip safe).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_matrix(path: &Path, header: bool) -> CliResult<Matrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("io", format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (line_no, line) in text.lines().enumerate() {
        if header && line_no == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                CliError::validation(
                    "csv-parse",
                    format!(
                        "{}:{}: column {} is not a real number: {:?}",
                        path.display(),
                        line_no + 1,
                        col + 1,
                        cell.trim()
                    ),
                )
            })?;
            if !value.is_finite() {
                return Err(CliError::validation(
                    "csv-parse",
                    format!(
                        "{}:{}: non-finite value in column {}",
                        path.display(),
                        line_no + 1,
                        col + 1
                    ),
                ));
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CliError::validation(
                    "csv-parse",
                    format!(
                        "{}:{}: expected {} columns, found {}",
                        path.display(),
                        line_no + 1,
                        w,
                        row.len()
                    ),
                ));
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::validation(
            "csv-parse",
            format!("{}: no data rows", path.display()),
        ));
    }
    Matrix::from_rows(&rows).map_err(CliError::from)
}

pub fn write_matrix(path: &Path, matrix: &Matrix) -> CliResult<()> {
    let mut out = String::new();
    for i in 0..matrix.rows() {
        let mut first = true;
        for &value in matrix.row(i) {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(value));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(CliError::from)
}

pub fn read_labels(path: &Path) -> CliResult<Vec<usize>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("io", format!("{}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: usize = trimmed.parse().map_err(|_| {
            CliError::validation(
                "labels-parse",
                format!(
                    "{}:{}: not a nonnegative integer: {trimmed:?}",
                    path.display(),
                    line_no + 1
                ),
            )
        })?;
        labels.push(value);
    }
    if labels.is_empty() {
        return Err(CliError::validation(
            "labels-parse",
            format!("{}: no labels", path.display()),
        ));
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[usize]) -> CliResult<()> {
    let mut out = String::new();
    for &l in labels {
        let _ = writeln!(out, "{l}");
    }
    fs::write(path, out).map_err(CliError::from)
}

/// Loads a basis file (N rows, d columns; columns span the subspace) and
/// orthonormalizes it.
pub fn read_basis(path: &Path, header: bool) -> CliResult<Subspace> {
    let m = read_matrix(path, header)?;
    Subspace::from_spanning(&m).map_err(CliError::from)
}

/// Basis files for labels 0..count at `<prefix><label>.csv`.
pub fn read_bases(prefix: &str, count: usize, header: bool) -> CliResult<Vec<Subspace>> {
    (0..count)
        .map(|l| read_basis(Path::new(&format!("{prefix}{l}.csv")), header))
        .collect()
}

pub fn write_basis(path: &Path, subspace: &Subspace) -> CliResult<()> {
    write_matrix(path, subspace.basis())
}
