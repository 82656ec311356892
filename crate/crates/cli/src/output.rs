//! Report emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::params::Format;

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_ENV: &str = "OWS_LAB_OUT_DIR";

/// What a command produced: a JSON report, the rows of its CSV mirror,
/// and whether its checks passed.
#[derive(Debug)]
pub struct Output {
    pub report: Value,
    pub rows: Vec<Map<String, Value>>,
    pub passed: bool,
}

impl Output {
    pub fn new(report: Value, rows: Vec<Map<String, Value>>) -> Self {
        Self {
            report,
            rows,
            passed: true,
        }
    }

    pub fn checked(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut text = serde_json::to_vec_pretty(&self.report)?;
                text.push(b'\n');
                Ok(text)
            }
            Format::Csv => csv_bytes(&self.rows),
        }
    }
}

/// Builds a CSV row from serializable values.
pub fn row(value: impl serde::Serialize) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m,
        Ok(other) => Map::from_iter([("value".to_owned(), other)]),
        Err(_) => Map::new(),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

/// Columns are the union of row keys in order of first appearance.
fn csv_bytes(rows: &[Map<String, Value>]) -> Result<Vec<u8>> {
    let mut header: Vec<&String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !header.contains(&k) {
                header.push(k);
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))?;
    }
    w.into_inner().context("flushing csv")
}

/// Relative paths land in `OWS_LAB_OUT_DIR` when it is set.
pub fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<PathBuf> {
    let path = output_path(path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes).map(|_| ()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}
