//! CSV and JSON writers with metadata sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip formatting with 17 significant digits; NaN becomes an empty field.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v == 0.0 {
        "0".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Row-oriented CSV table.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: impl IntoIterator<Item = f64>) {
        self.push(row.into_iter().map(fmt_f64).collect());
    }
}

/// Output directory plus the provenance shared by every file of a run.
pub struct OutputDir {
    pub root: PathBuf,
    pub command: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
}

impl OutputDir {
    pub fn create(root: &Path, command: &'static str, params: Value, seed: Option<u64>) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            command,
            params,
            seed,
        })
    }

    fn meta(&self, file: &str, units: &Value, extra: Value) -> Value {
        json!({
            "file": file,
            "tool": "nhmagic",
            "version": VERSION,
            "command": self.command,
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "seed": self.seed,
            "units": units,
            "params": self.params,
            "extra": extra,
        })
    }

    fn write_text(&self, name: &str, text: &str) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Write `name` and its `name.meta.json` sidecar.
    pub fn write_csv(&self, name: &str, table: &Table, units: Value, extra: Value) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Csv {
            path: path.clone(),
            source: e,
        })?;
        let csv_err = |e| CliError::Csv {
            path: path.clone(),
            source: e,
        };
        w.write_record(&table.header).map_err(csv_err)?;
        for row in &table.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.write_sidecar(name, units, extra)?;
        Ok(path)
    }

    pub fn write_sidecar(&self, name: &str, units: Value, extra: Value) -> CliResult<PathBuf> {
        let meta = self.meta(name, &units, extra);
        self.write_json_value(&format!("{name}.meta.json"), &meta)
    }

    /// Write a JSON document that carries its own metadata block.
    pub fn write_json<T: Serialize>(&self, name: &str, body: &T, units: Value) -> CliResult<PathBuf> {
        let body = serde_json::to_value(body).map_err(|e| CliError::Config(e.to_string()))?;
        let doc = json!({ "meta": self.meta(name, &units, Value::Null), "result": body });
        self.write_json_value(name, &doc)
    }

    fn write_json_value(&self, name: &str, v: &Value) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
        self.write_text(name, &(text + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.415_037_499_278_843_8, -1.0 / 3.0, 1e-300, 123456.789] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(fmt_f64(f64::NAN), "");
        assert_eq!(fmt_f64(0.0), "0");
    }
}
