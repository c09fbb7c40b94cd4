//! Tabular output, run manifests and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self, out: &mut String) {
        match self {
            // Debug formatting is the shortest representation that parses
            // back to the same f64.
            Cell::Num(v) => write!(out, "{v:?}").unwrap(),
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap(),
            Cell::Text(s) => out.push_str(s),
            Cell::Bool(b) => write!(out, "{b}").unwrap(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, manifest: &Value) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({ "manifest": manifest, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string(&doc).expect("table values are finite");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::param("format", "expected csv or json")),
        }
    }
}

/// What was run and how well the internal cross-checks agreed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub spec: Value,
    pub tool_version: &'static str,
    pub seed: u64,
    pub wall_time_seconds: Option<f64>,
    pub tolerance_report: Vec<(String, f64)>,
}

impl RunManifest {
    /// Without wall time the value depends only on the spec and seed.
    pub fn to_value(&self, with_wall_time: bool) -> Value {
        let mut report = Map::new();
        for (k, v) in &self.tolerance_report {
            report.insert(k.clone(), json!(v));
        }
        let mut m = Map::new();
        m.insert("spec".into(), self.spec.clone());
        m.insert("tool_version".into(), json!(self.tool_version));
        m.insert("seed".into(), json!(self.seed));
        m.insert("tolerance_report".into(), Value::Object(report));
        if with_wall_time {
            m.insert("wall_time_seconds".into(), json!(self.wall_time_seconds));
        }
        Value::Object(m)
    }
}

/// Sidecar path holding the full manifest next to a data file.
pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    data.with_file_name(name)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
