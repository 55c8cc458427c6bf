//! Result tables: CSV is canonical, JSON mirrors it column for column.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::LabResult;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Empty,
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Value {
    pub fn opt(v: Option<i64>) -> Value {
        v.map_or(Value::Empty, Value::Int)
    }

    pub fn opt_float(v: Option<f64>) -> Value {
        v.map_or(Value::Empty, Value::Float)
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Empty => serde_json::Value::Null,
            Value::Int(i) => json!(i),
            // JSON has no non-finite numbers; those travel as strings.
            Value::Float(x) if x.is_finite() => json!(x),
            Value::Float(x) => json!(x.to_string()),
            Value::Bool(b) => json!(b),
            Value::Text(s) => json!(s),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Empty => Ok(()),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Deterministic invariants that failed; any entry makes `run` exit
    /// non-zero.
    pub hard_failures: Vec<String>,
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Table {
            kind: kind.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            hard_failures: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Rows whose `pass` column is `false`.
    pub fn failed_rows(&self) -> usize {
        let Some(k) = self.column("pass") else {
            return 0;
        };
        self.rows.iter().filter(|r| r[k] == Value::Bool(false)).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> LabResult<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|v| v.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Array(r.iter().map(Value::to_json).collect()))
            .collect();
        json!({
            "kind": self.kind,
            "columns": self.columns,
            "rows": rows,
            "hard_failures": self.hard_failures,
        })
    }

    /// Writes `path` as CSV and the JSON mirror with the extension swapped.
    pub fn save(&self, path: &Path) -> LabResult<PathBuf> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut csv_bytes = Vec::new();
        self.write_csv(&mut csv_bytes)?;
        std::fs::write(path, csv_bytes)?;
        let json_path = path.with_extension("json");
        let mut text = serde_json::to_string_pretty(&self.to_json())?;
        text.push('\n');
        std::fs::write(&json_path, text)?;
        Ok(json_path)
    }
}
