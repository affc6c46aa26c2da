//! Report serialization: deterministic JSON with fixed-width floats and
//! plot-ready CSV tables.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// JSON formatter printing every float as decimal scientific notation with
/// 17 significant digits, enough to round-trip a double losslessly and keep
/// report bytes identical across runs.
#[derive(Clone, Default)]
pub struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        // non-finite residuals (divergent mass integrals) must stay valid JSON
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            write!(writer, "null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            write!(writer, "null")
        }
    }
}

/// Serializes any value to the canonical report JSON (pretty would bloat
/// diffs; this stays single-line and byte-stable).
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut ser).expect("report serialization cannot fail");
    String::from_utf8(out).expect("report JSON is utf-8")
}

/// One verification suite inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub status: String,
    pub residuals: serde_json::Value,
    pub tables: serde_json::Value,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        SuiteReport {
            name: name.into(),
            status: if pass { "pass" } else { "fail" }.into(),
            residuals: serde_json::Value::Null,
            tables: serde_json::Value::Null,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Top-level report: config echo, suites, overall pass.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: serde_json::Value, suites: Vec<SuiteReport>) -> Self {
        let pass = suites.iter().all(|s| s.passed());
        Report { config, suites, pass }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// CSV with a header row and one record per row; floats at 17 significant
/// digits.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{:.16e}", v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
