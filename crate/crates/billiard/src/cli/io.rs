//! Deterministic artifact I/O: little-endian flat binaries with JSON
//! headers, CSV tables, and JSON-lines streams.
//!
//! Floats in text formats use Rust's shortest round-trip formatting, so a
//! value re-read from any artifact is bit-identical to the value written
//! and identical inputs always produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

/// An artifact read or write failure, carrying the path involved.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("io failure at {path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON at {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("malformed table {path}: {message}")]
    Table { path: PathBuf, message: String },
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

/// Creates the directory (and parents) if needed.
pub fn ensure_dir(path: &Path) -> Result<(), IoError> {
    fs::create_dir_all(path).map_err(file_err(path))
}

/// Writes `values` as a flat little-endian `f64` binary.
pub fn write_f64_bin(path: &Path, values: &[f64]) -> Result<(), IoError> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(file_err(path))
}

/// Reads a flat little-endian `f64` binary.
pub fn read_f64_bin(path: &Path) -> Result<Vec<f64>, IoError> {
    let bytes = fs::read(path).map_err(file_err(path))?;
    if bytes.len() % 8 != 0 {
        return Err(IoError::Table {
            path: path.to_path_buf(),
            message: format!("length {} is not a multiple of 8", bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Writes `cells` as a flat `i8` binary.
pub fn write_i8_bin(path: &Path, cells: &[i8]) -> Result<(), IoError> {
    let bytes: Vec<u8> = cells.iter().map(|&c| c as u8).collect();
    fs::write(path, bytes).map_err(file_err(path))
}

/// Reads a flat `i8` binary.
pub fn read_i8_bin(path: &Path) -> Result<Vec<i8>, IoError> {
    let bytes = fs::read(path).map_err(file_err(path))?;
    Ok(bytes.into_iter().map(|b| b as i8).collect())
}

/// Writes pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(file_err(path))
}

/// Reads a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes one JSON document per line.
pub fn write_jsonl<T: Serialize>(path: &Path, values: &[T]) -> Result<(), IoError> {
    let mut text = String::new();
    for value in values {
        let line = serde_json::to_string(value).map_err(|source| IoError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        text.push_str(&line);
        text.push('\n');
    }
    fs::write(path, text).map_err(file_err(path))
}

/// Reads a JSON-lines file.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| {
            serde_json::from_str(line).map_err(|source| IoError::Json {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

/// A CSV table assembled in memory and written atomically.
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        CsvTable {
            text,
            columns: header.len(),
        }
    }

    /// Appends one row; panics if the width differs from the header.
    pub fn row(&mut self, fields: &[CsvField]) -> &mut Self {
        assert_eq!(fields.len(), self.columns, "CSV row width mismatch");
        for (i, field) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match field {
                CsvField::Float(v) => {
                    write!(self.text, "{v}").expect("string write");
                }
                CsvField::Int(v) => {
                    write!(self.text, "{v}").expect("string write");
                }
                CsvField::Str(v) => self.text.push_str(v),
            }
        }
        self.text.push('\n');
        self
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        fs::write(path, &self.text).map_err(file_err(path))
    }
}

/// One CSV cell.
pub enum CsvField {
    Float(f64),
    Int(i64),
    Str(&'static str),
}

/// Reads one named column of a CSV file as floats.
pub fn read_csv_column(path: &Path, column: &str) -> Result<Vec<f64>, IoError> {
    let text = fs::read_to_string(path).map_err(file_err(path))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| IoError::Table {
        path: path.to_path_buf(),
        message: "empty file".into(),
    })?;
    let idx = header
        .split(',')
        .position(|name| name == column)
        .ok_or_else(|| IoError::Table {
            path: path.to_path_buf(),
            message: format!("no column named {column}"),
        })?;
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cell = line.split(',').nth(idx).ok_or_else(|| IoError::Table {
            path: path.to_path_buf(),
            message: format!("line {} too short", lineno + 2),
        })?;
        let value: f64 = cell.parse().map_err(|_| IoError::Table {
            path: path.to_path_buf(),
            message: format!("line {}: not a float: {cell}", lineno + 2),
        })?;
        out.push(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_binary_roundtrips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bin");
        let values = vec![0.0, -1.5, std::f64::consts::PI, 1e-300, 2.0f64.powi(60)];
        write_f64_bin(&path, &values).unwrap();
        assert_eq!(read_f64_bin(&path).unwrap(), values);
    }

    #[test]
    fn csv_written_values_reparse_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let values = [0.1, 2.0 / 3.0, 1.0e-17, 123456.789];
        let mut table = CsvTable::new(&["i", "v"]);
        for (i, &v) in values.iter().enumerate() {
            table.row(&[CsvField::Int(i as i64), CsvField::Float(v)]);
        }
        table.write(&path).unwrap();
        let back = read_csv_column(&path, "v").unwrap();
        assert_eq!(back.len(), values.len());
        for (a, b) in back.iter().zip(&values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn jsonl_roundtrips() {
        #[derive(Serialize, serde::Deserialize, PartialEq, Debug)]
        struct Row {
            k: f64,
            tag: String,
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let rows = vec![
            Row {
                k: 40.25,
                tag: "a".into(),
            },
            Row {
                k: 41.5,
                tag: "b".into(),
            },
        ];
        write_jsonl(&path, &rows).unwrap();
        let back: Vec<Row> = read_jsonl(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        CsvTable::new(&["a"])
            .row(&[CsvField::Float(1.0)])
            .write(&path)
            .unwrap();
        match read_csv_column(&path, "b") {
            Err(IoError::Table { message, .. }) => assert!(message.contains("b")),
            other => panic!("expected Table error, got {other:?}"),
        }
    }
}
