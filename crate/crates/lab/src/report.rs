//! Run reports and their two serialisations.
//!
//! Line-JSON: one object per line, tagged by `kind` (`header`, `row`,
//! `snapshot`, `summary`, `diagnostics`). CSV: the rows only, with a header
//! line, floats as `{:.16e}` and `\n` line endings.

use std::io::Write;
use std::path::Path;

use loewner_core::Complex64;
use serde_json::{Map, Value};

use crate::error::{LabError, Result};

/// Bumped when the line layout changes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Self::Int(i) => Value::from(*i),
            Self::Float(x) => float_json(*x),
            Self::Text(s) => Value::from(s.as_str()),
            Self::Bool(b) => Value::from(*b),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Float(x) => format!("{x:.16e}"),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
        }
    }
}

/// Non-finite floats become the strings `"NaN"`, `"inf"`, `"-inf"`.
pub fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::from(x.to_string()), Value::Number)
}

pub fn complex_json(z: Complex64) -> Value {
    Value::from(vec![float_json(z.re), float_json(z.im)])
}

pub fn complex_list_json(v: &[Complex64]) -> Value {
    Value::from(v.iter().map(|z| complex_json(*z)).collect::<Vec<_>>())
}

/// Ordered named cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row(pub Vec<(String, Cell)>);

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn int(mut self, k: &str, v: impl TryInto<i64>) -> Self {
        let v = v.try_into().unwrap_or(i64::MAX);
        self.0.push((k.into(), Cell::Int(v)));
        self
    }

    pub fn float(mut self, k: &str, v: f64) -> Self {
        self.0.push((k.into(), Cell::Float(v)));
        self
    }

    pub fn text(mut self, k: &str, v: impl Into<String>) -> Self {
        self.0.push((k.into(), Cell::Text(v.into())));
        self
    }

    pub fn boolean(mut self, k: &str, v: bool) -> Self {
        self.0.push((k.into(), Cell::Bool(v)));
        self
    }

    /// `k_re`, `k_im`.
    pub fn complex(self, k: &str, z: Complex64) -> Self {
        self.float(&format!("{k}_re"), z.re).float(&format!("{k}_im"), z.im)
    }

    /// `{prefix}{i}_re`, `{prefix}{i}_im` for `i = 1, 2, …`.
    pub fn complexes(mut self, prefix: &str, v: &[Complex64]) -> Self {
        for (i, z) in v.iter().enumerate() {
            self = self.complex(&format!("{prefix}{}", i + 1), *z);
        }
        self
    }

    pub fn floats(mut self, prefix: &str, v: &[f64]) -> Self {
        for (i, x) in v.iter().enumerate() {
            self = self.float(&format!("{prefix}{i}"), *x);
        }
        self
    }

    fn to_json(&self) -> Map<String, Value> {
        self.0.iter().map(|(k, c)| (k.clone(), c.to_json())).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    pub rows: Vec<Row>,
    pub snapshots: Vec<Value>,
    pub summary: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
}

fn tagged(kind: &str, body: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), kind.into());
    m.extend(body);
    Value::Object(m)
}

impl RunReport {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            command: command.into(),
            config,
            rows: Vec::new(),
            snapshots: Vec::new(),
            summary: Map::new(),
            diagnostics: Map::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn summary(&mut self, k: &str, v: impl Into<Value>) {
        self.summary.insert(k.into(), v.into());
    }

    pub fn summary_f(&mut self, k: &str, v: f64) {
        self.summary.insert(k.into(), float_json(v));
    }

    pub fn diagnostic(&mut self, k: &str, v: impl Into<Value>) {
        self.diagnostics.insert(k.into(), v.into());
    }

    pub fn diagnostic_f(&mut self, k: &str, v: f64) {
        self.diagnostics.insert(k.into(), float_json(v));
    }

    pub fn to_line_json(&self) -> String {
        let mut header = Map::new();
        header.insert("format_version".into(), FORMAT_VERSION.into());
        header.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        header.insert("command".into(), self.command.clone().into());
        header.insert("config".into(), self.config.clone());
        let mut lines = vec![tagged("header", header)];
        lines.extend(self.rows.iter().map(|r| tagged("row", r.to_json())));
        lines.extend(self.snapshots.iter().map(|s| {
            let mut m = Map::new();
            m.insert("data".into(), s.clone());
            tagged("snapshot", m)
        }));
        lines.push(tagged("summary", self.summary.clone()));
        lines.push(tagged("diagnostics", self.diagnostics.clone()));
        let mut out = String::new();
        for l in lines {
            out.push_str(&serde_json::to_string(&l).expect("reports serialize"));
            out.push('\n');
        }
        out
    }

    /// Rows as CSV. Columns come from the first row; rows with other
    /// columns are an error.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let Some(first) = self.rows.first() else {
            return Ok(out);
        };
        let cols: Vec<&str> = first.0.iter().map(|(k, _)| k.as_str()).collect();
        out.push_str(&cols.join(","));
        out.push('\n');
        for r in &self.rows {
            if r.0.len() != cols.len() || r.0.iter().zip(&cols).any(|((k, _), c)| k != c) {
                return Err(LabError::Usage("rows have differing columns; use --format line-json".into()));
            }
            let cells: Vec<String> = r.0.iter().map(|(_, c)| c.to_csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| LabError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| LabError::io(path, e))?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

/// A parsed line-JSON report, kept as raw values.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub lines: Vec<Value>,
}

impl ParsedReport {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, l) in text.lines().enumerate() {
            if l.trim().is_empty() {
                continue;
            }
            let v: Value = serde_json::from_str(l)
                .map_err(|e| LabError::Incompatible(format!("line {}: not JSON ({e})", i + 1)))?;
            if v.get("kind").and_then(Value::as_str).is_none() {
                return Err(LabError::Incompatible(format!("line {}: no kind tag", i + 1)));
            }
            lines.push(v);
        }
        match lines.first().and_then(|v| v.get("kind")).and_then(Value::as_str) {
            Some("header") => Ok(Self { lines }),
            _ => Err(LabError::Incompatible("first line is not a header".into())),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new("demo", serde_json::json!({"order": 3}));
        r.push(Row::new().int("step", 0).float("t", 0.0).complex("c", Complex64::new(1.0, -0.5)));
        r.push(Row::new().int("step", 1).float("t", 0.1).complex("c", Complex64::new(1.0 / 3.0, 2e-20)));
        r.summary_f("drift", 1.5e-12);
        r.diagnostic("swallowed", 0);
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], "step,t,c_re,c_im");
        assert_eq!(lines[2], "1,1.0000000000000001e-1,3.3333333333333331e-1,1.9999999999999999e-20");
        assert!(!csv.contains('\r'));
        let mut bad = sample();
        bad.push(Row::new().int("other", 1));
        assert!(bad.to_csv().is_err());
    }

    #[test]
    fn line_json_parses_back() {
        let text = sample().to_line_json();
        let parsed = ParsedReport::parse(&text).unwrap();
        assert_eq!(parsed.lines.len(), 5);
        assert_eq!(parsed.lines[2]["c_re"].as_f64().unwrap(), 1.0 / 3.0);
        assert!(ParsedReport::parse("{\"kind\":\"row\"}").is_err());
        assert!(ParsedReport::parse("not json").is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        write_atomic(&p, "a\n").unwrap();
        write_atomic(&p, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
        let e = write_atomic(&dir.path().join("missing/r.jsonl"), "x").unwrap_err();
        assert_eq!(e.exit_code(), 4);
    }
}
