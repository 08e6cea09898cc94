//! File plumbing: atomic writes, float formatting and numeric CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Shortest decimal string that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::runtime(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| CliError::runtime(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::runtime(format!("{}: {e}", path.display()))
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::runtime(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(r).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::runtime(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn ensure_dir(dir: &Path) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("{}: {e}", dir.display())))?;
    Ok(dir.to_path_buf())
}

/// `x1..xp` column names.
pub fn coord_header(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("x{i}")).collect()
}

/// A fully numeric CSV file with a header row.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Table> {
        let text = fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        Table::parse(&text).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
    }

    /// Parses CSV text. Errors name the 1-based line and the column.
    pub fn parse(text: &str) -> Result<Table, String> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header: Vec<String> = r
            .headers()
            .map_err(|e| format!("header: {e}"))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err("empty file".into());
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| match e.position() {
                Some(pos) => format!("line {}: {e}", pos.line()),
                None => e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let row = rec
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    cell.parse::<f64>().map_err(|_| {
                        format!("line {line}, column {} ('{}'): cannot parse '{cell}' as a number", c + 1, header[c])
                    })
                })
                .collect::<Result<Vec<f64>, String>>()?;
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Indices of the `x1, x2, ...` columns, in order; there must be at least one.
    pub fn coord_columns(&self) -> Result<Vec<usize>, String> {
        let mut idx = Vec::new();
        while let Some(c) = self.column(&format!("x{}", idx.len() + 1)) {
            idx.push(c);
        }
        if idx.is_empty() {
            return Err("no coordinate columns (expected x1, x2, ...)".into());
        }
        Ok(idx)
    }

    pub fn points(&self) -> Result<Vec<Vec<f64>>, String> {
        let cols = self.coord_columns()?;
        Ok(self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect())
    }

    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}
