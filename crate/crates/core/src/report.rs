//! Verification reports: one JSON document per run plus an optional CSV of
//! pointwise densities and fit samples.

use crate::error::Result;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

pub const SCHEMA: &str = "tracedefect-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TolKind {
    Abs,
    Rel,
}

/// One asserted identity lhs = rhs. `lhs`/`rhs` are real parts; imaginary
/// parts live in the breakdown.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub identity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub tol_kind: TolKind,
    pub pass: bool,
    pub breakdown: Value,
}

impl Check {
    fn build(identity: &str, lhs: Complex64, rhs: Complex64, tol: f64, kind: TolKind, floor: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_err = if scale > 0.0 { abs_err / scale } else { 0.0 };
        let pass = match kind {
            TolKind::Abs => abs_err <= tol,
            TolKind::Rel => abs_err <= tol * scale.max(floor),
        };
        Check {
            identity: identity.to_string(),
            lhs: lhs.re,
            rhs: rhs.re,
            abs_err,
            rel_err,
            tol,
            tol_kind: kind,
            pass: pass && abs_err.is_finite(),
            breakdown: json!({ "lhs_im": lhs.im, "rhs_im": rhs.im }),
        }
    }

    pub fn abs(identity: &str, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        Self::build(identity, lhs, rhs, tol, TolKind::Abs, 0.0)
    }

    /// Relative tolerance against max(|lhs|, |rhs|, floor).
    pub fn rel(identity: &str, lhs: Complex64, rhs: Complex64, tol: f64, floor: f64) -> Self {
        let mut c = Self::build(identity, lhs, rhs, tol, TolKind::Rel, floor);
        c.breakdown["rel_floor"] = json!(floor);
        c
    }

    /// Real-valued shorthand.
    pub fn abs_re(identity: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::abs(identity, Complex64::new(lhs, 0.0), Complex64::new(rhs, 0.0), tol)
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.breakdown[key] = serde_json::to_value(value).unwrap_or(Value::Null);
        self
    }
}

/// A CSV row: series name, up to two coordinates and a complex value.
#[derive(Clone, Debug, Serialize)]
pub struct CsvRow {
    pub series: String,
    pub t1: f64,
    pub t2: f64,
    pub re: f64,
    pub im: f64,
}

impl CsvRow {
    pub fn new(series: &str, t1: f64, t2: f64, v: Complex64) -> Self {
        CsvRow {
            series: series.to_string(),
            t1,
            t2,
            re: v.re,
            im: v.im,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub pass: bool,
    /// Command-specific payload: text forms, fitted coefficients.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    #[serde(skip)]
    pub rows: Vec<CsvRow>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            config: Value::Null,
            checks: vec![],
            warnings: vec![],
            pass: true,
            data: Value::Null,
            rows: vec![],
        }
    }

    pub fn push(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    /// Appends the checks, warnings and rows of another report, prefixing
    /// identities with its command.
    pub fn absorb(&mut self, other: Report) {
        for mut c in other.checks {
            c.identity = format!("{}: {}", other.command, c.identity);
            self.push(c);
        }
        self.warnings.extend(other.warnings);
        self.rows.extend(other.rows);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| std::io::Error::other(e.to_string()))?;
        }
        if self.rows.is_empty() {
            w.write_record(["series", "t1", "t2", "re", "im"])
                .map_err(|e| std::io::Error::other(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        write_atomic(path, &bytes)
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
