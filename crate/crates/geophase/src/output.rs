//! Deterministic file emission: CSV tables, statistics and metadata JSON.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::RunError;

/// Round-trip exact, locale independent float text.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// A CSV table held in memory until the run succeeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file_name: &str, header: &[&str]) -> Self {
        Self {
            file_name: file_name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, RunError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| RunError::Io(e.into_error()))
    }
}

/// Converts a statistic to JSON; non-finite and missing values become `null`.
pub fn stat(x: Option<f64>) -> Value {
    match x {
        Some(v) if v.is_finite() => Value::from(v),
        _ => Value::Null,
    }
}

pub fn json_bytes(value: &Value) -> Result<Vec<u8>, RunError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes every file into `dir`, creating it if needed.
pub fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// Sorted-key object from pairs.
pub fn object<I: IntoIterator<Item = (String, Value)>>(pairs: I) -> Value {
    Value::Object(pairs.into_iter().collect::<Map<String, Value>>())
}
