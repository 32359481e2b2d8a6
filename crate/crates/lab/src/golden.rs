//! Fieldwise comparison of line-JSON reports.

use serde_json::Value;

use crate::error::{LabError, Result};
use crate::report::ParsedReport;

/// Diagnostics keys that legitimately differ between runs.
const IGNORED_KEYS: &[&str] = &["wall_time_s"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub const EXACT: Self = Self { rtol: 0.0, atol: 0.0 };

    fn accepts(&self, got: f64, want: f64) -> bool {
        if got.to_bits() == want.to_bits() {
            return true;
        }
        (got - want).abs() <= self.atol + self.rtol * want.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Difference {
    pub field: String,
    pub got: Value,
    pub want: Value,
}

impl std::fmt::Display for Difference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: got {}, golden {}", self.field, self.got, self.want)
    }
}

fn incompatible(field: &str, what: &str) -> LabError {
    LabError::Incompatible(format!("{field}: {what}"))
}

fn walk(field: &str, got: &Value, want: &Value, tol: Tolerance, out: &mut Vec<Difference>) -> Result<()> {
    let differ = |out: &mut Vec<Difference>| {
        out.push(Difference { field: field.into(), got: got.clone(), want: want.clone() })
    };
    match (got, want) {
        (Value::Object(a), Value::Object(b)) => {
            let keys = |m: &serde_json::Map<String, Value>| {
                let mut k: Vec<String> = m.keys().filter(|k| !IGNORED_KEYS.contains(&k.as_str())).cloned().collect();
                k.sort();
                k
            };
            if keys(a) != keys(b) {
                return Err(incompatible(field, "different fields"));
            }
            for k in keys(a) {
                walk(&format!("{field}.{k}"), &a[&k], &b[&k], tol, out)?;
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                return Err(incompatible(field, "different lengths"));
            }
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                walk(&format!("{field}[{i}]"), x, y, tol, out)?;
            }
        }
        (Value::Number(a), Value::Number(b)) => {
            let int = |n: &serde_json::Number| n.is_i64() || n.is_u64();
            if int(a) && int(b) {
                if a != b {
                    differ(out);
                }
            } else if !tol.accepts(a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN)) {
                differ(out);
            }
        }
        (Value::String(a), Value::String(b)) => {
            if a != b {
                differ(out);
            }
        }
        (Value::Bool(a), Value::Bool(b)) => {
            if a != b {
                differ(out);
            }
        }
        (Value::Null, Value::Null) => {}
        // a float that became a non-finite marker string, or vice versa
        (Value::Number(_), Value::String(_)) | (Value::String(_), Value::Number(_)) => differ(out),
        _ => return Err(incompatible(field, "different value types")),
    }
    Ok(())
}

/// All value differences; structural differences are an error.
pub fn compare(report: &ParsedReport, golden: &ParsedReport, tol: Tolerance) -> Result<Vec<Difference>> {
    if report.lines.len() != golden.lines.len() {
        return Err(LabError::Incompatible(format!(
            "{} lines against {} in the golden file",
            report.lines.len(),
            golden.lines.len()
        )));
    }
    let mut out = Vec::new();
    for (i, (a, b)) in report.lines.iter().zip(&golden.lines).enumerate() {
        let kind = b.get("kind").and_then(Value::as_str).unwrap_or("?");
        if a.get("kind") != b.get("kind") {
            return Err(LabError::Incompatible(format!("line {}: kind differs", i + 1)));
        }
        walk(&format!("line {} ({kind})", i + 1), a, b, tol, &mut out)?;
    }
    Ok(out)
}
