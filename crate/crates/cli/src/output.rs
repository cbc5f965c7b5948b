//! CSV tables, artifact writing and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// One output file, produced in memory and written once the experiment
/// has finished.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Shortest string that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(k) => Some(*k as f64),
            Cell::Text(_) => None,
        }
    }
}

/// A CSV table kept as cells so plots can be drawn from the same data.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        let k = self.header.iter().position(|h| *h == name).expect("known column");
        self.rows.iter().map(|r| r[k].as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Reads two named numeric columns from a CSV file with a header row.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Io(format!("{}: missing column '{name}'", path.display())))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let parse = |k: usize| -> Result<f64, CliError> {
            record.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| {
                CliError::Io(format!("{}: bad number on data row {}", path.display(), line + 1))
            })
        };
        xs.push(parse(ix)?);
        ys.push(parse(iy)?);
    }
    Ok((xs, ys))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub seed: u64,
    pub config_sha256: String,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub files: Vec<FileEntry>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp: PathBuf = path.with_extension("partial");
    let err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut f = fs::File::create(&tmp).map_err(err)?;
    f.write_all(bytes).map_err(err)?;
    f.sync_all().map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

/// Writes every artifact and returns their manifest entries.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<FileEntry>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    artifacts
        .iter()
        .map(|a| {
            write_atomic(&dir.join(&a.name), &a.bytes)?;
            Ok(FileEntry { name: a.name.clone(), sha256: sha256_hex(&a.bytes), bytes: a.bytes.len() })
        })
        .collect()
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(&dir.join("manifest.json"), text.as_bytes())
}
