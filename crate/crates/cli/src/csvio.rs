//! Reading and writing the comma-separated files used by every command.
//!
//! Input accepts an optional single header row, detected as a first row
//! containing any non-numeric cell. Derived numbers are written in plain
//! decimal with 12 significant digits; generated data is written with the
//! shortest representation that parses back to the same value.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use tkmerge::{DataMatrix, Partition};

use crate::error::{CliError, Result};

/// Parsed numeric table with its optional header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    Ok(csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file))
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = reader(path)?;
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line,
            column: 0,
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if idx == 0 && record.iter().any(|c| c.parse::<f64>().is_err()) {
            header = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line,
                column: record.len().min(expected) + 1,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| CliError::Parse {
                path: path.to_path_buf(),
                line,
                column: col + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(CliError::Parse {
                    path: path.to_path_buf(),
                    line,
                    column: col + 1,
                    message: format!("'{cell}' is not finite"),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input { path: path.to_path_buf(), message: "no data rows".into() });
    }
    Ok(Table { header, rows })
}

pub fn read_matrix(path: &Path) -> Result<DataMatrix> {
    let table = read_table(path)?;
    DataMatrix::from_rows(&table.rows).map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })
}

/// Reads a label column: the column named `label` when the header has one,
/// otherwise the first column. Labels must be non-negative integers.
pub fn read_labels(path: &Path) -> Result<Partition> {
    let table = read_table(path)?;
    let col = table
        .header
        .as_ref()
        .and_then(|h| h.iter().position(|c| c.eq_ignore_ascii_case("label")))
        .unwrap_or(0);
    let mut labels = Vec::with_capacity(table.rows.len());
    let offset = usize::from(table.header.is_some());
    for (i, row) in table.rows.iter().enumerate() {
        let v = row[col];
        if v < 0.0 || v.fract() != 0.0 {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: i + 1 + offset,
                column: col + 1,
                message: format!("label {v} is not a non-negative integer"),
            });
        }
        labels.push(v as usize);
    }
    Ok(Partition::from_labels(labels))
}

/// Plain decimal with 12 significant digits and no trailing zeros.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (_, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let rounded: f64 = sci.parse().expect("round trip of formatted float");
    let decimals = (11 - exp).max(0) as usize;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Shortest plain-decimal representation that parses back exactly.
pub fn fmt_exact(v: f64) -> String {
    format!("{v}")
}

pub fn column_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("x{j}")).collect()
}

pub fn matrix_csv(data: &DataMatrix, exact: bool) -> String {
    let mut out = column_names(data.p()).join(",");
    out.push('\n');
    let f = if exact { fmt_exact } else { fmt_num };
    for row in data.rows() {
        let cells: Vec<String> = row.iter().map(|&v| f(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn labels_csv(labels: &[usize]) -> String {
    let mut out = String::from("label\n");
    for l in labels {
        let _ = writeln!(out, "{l}");
    }
    out
}

/// Coordinates followed by the label of each row.
pub fn scatter_csv(data: &DataMatrix, labels: &[usize]) -> String {
    let mut out = column_names(data.p()).join(",");
    out.push_str(",label\n");
    for (row, l) in data.rows().zip(labels) {
        for v in row {
            out.push_str(&fmt_num(*v));
            out.push(',');
        }
        let _ = writeln!(out, "{l}");
    }
    out
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write { path: path.clone(), source })?;
    Ok(path)
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })
}
