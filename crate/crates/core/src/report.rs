//! Machine-readable run artifacts: suite reports, merged reports, and the
//! fixed-precision JSON and CSV writers used for them.
//!
//! Floats are printed with 17 significant digits in scientific notation so
//! that identical runs give byte-identical files and every value parses back
//! to the same `f64`. Object keys are sorted.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{input, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 0, trials: 1000, tol: 1e-9, budget: 10_000 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return input("trials must be at least 1");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return input(format!("tol must be > 0, got {}", self.tol));
        }
        Ok(())
    }
}

/// One assertion of a suite: `value` compared against `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value >= threshold, value, threshold }
    }

    /// `|value - target| <= tol`; the stored threshold is the tolerance.
    pub fn close(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let err = (value - target).abs();
        Self { name: name.into(), passed: err <= tol, value: err, threshold: tol }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let passed = (lo..=hi).contains(&value);
        Self { name: name.into(), passed, value, threshold: if value < lo { lo } else { hi } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    /// Witness of the first failing check, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl SuiteReport {
    pub fn new(suite: &str, config: RunConfig) -> Self {
        Self { suite: suite.into(), passed: true, config, checks: Vec::new(), table: None, witness: None }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// Push a check and, if it is the first failure, keep its witness.
    pub fn push_with_witness(&mut self, check: Check, witness: impl Serialize) -> Result<()> {
        if !check.passed && self.witness.is_none() {
            self.witness = Some(serde_json::to_value(witness)?);
        }
        self.push(check);
        Ok(())
    }

    /// The table if present, else the checks as rows `passed, value, threshold`
    /// with the check names in a leading text column.
    pub fn to_csv(&self) -> Result<String> {
        match &self.table {
            Some(t) => table_csv(t),
            None => checks_csv(std::iter::once((self.suite.as_str(), self.checks.as_slice()))),
        }
    }
}

/// Several suite reports keyed by suite name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedReport {
    pub passed: bool,
    pub sections: std::collections::BTreeMap<String, SuiteReport>,
}

pub fn merge_reports(reports: Vec<SuiteReport>) -> Result<MergedReport> {
    if reports.is_empty() {
        return input("nothing to merge");
    }
    let passed = reports.iter().all(|r| r.passed);
    let mut sections = std::collections::BTreeMap::new();
    for r in reports {
        if sections.contains_key(&r.suite) {
            return input(format!("suite {} appears twice", r.suite));
        }
        sections.insert(r.suite.clone(), r);
    }
    Ok(MergedReport { passed, sections })
}

impl MergedReport {
    pub fn to_csv(&self) -> Result<String> {
        checks_csv(self.sections.values().map(|r| (r.suite.as_str(), r.checks.as_slice())))
    }
}

/// 17 significant digits, scientific notation; non-finite values become
/// `null` in JSON.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of artifacts
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

/// Pretty JSON with sorted keys and fixed float formatting.
pub fn to_json_string(value: &impl Serialize) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => write!(out, "{u}").unwrap(),
            (_, Some(i), _) => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) if f.is_finite() => out.push_str(&format_f64(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short numeric arrays stay on one line
            if items.iter().all(|i| i.is_number()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, i, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, i, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*key], indent + 1);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Input(format!("csv: {e}"))
}

pub fn table_csv(t: &Table) -> Result<String> {
    let mut w = writer();
    w.write_record(&t.columns).map_err(csv_err)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|v| format_f64(*v))).map_err(csv_err)?;
    }
    finish(w)
}

fn checks_csv<'a>(sections: impl Iterator<Item = (&'a str, &'a [Check])>) -> Result<String> {
    let mut w = writer();
    w.write_record(["suite", "check", "passed", "value", "threshold"]).map_err(csv_err)?;
    for (suite, checks) in sections {
        for c in checks {
            let passed = if c.passed { "true" } else { "false" };
            w.write_record([suite, &c.name, passed, &format_f64(c.value), &format_f64(c.threshold)])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

/// Parse a table written by [`table_csv`].
pub fn parse_table_csv(text: &str) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let columns = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| crate::error::Error::Input(format!("{s}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 4.0, 1e-300, -2.5e17, f64::MIN_POSITIVE, 123456789.12345679] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits: String = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
            assert_eq!(digits.len(), 17);
        }
        assert_eq!(format_f64(-0.0), format_f64(0.0));
    }

    #[test]
    fn json_is_sorted_and_valid() {
        let mut r = SuiteReport::new("demo", RunConfig::default());
        r.push(Check::at_most("b", 0.5, 1.0));
        r.push(Check::at_least("a", 0.5, 1.0));
        let s = to_json_string(&r).unwrap();
        let back: SuiteReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(!back.passed);
        assert!(s.find("\"checks\"").unwrap() < s.find("\"config\"").unwrap());
        assert!(s.contains("5.0000000000000000e-1"));
        assert_eq!(s, to_json_string(&back).unwrap());
    }

    #[test]
    fn merge_examples() {
        let a = SuiteReport::new("ftc", RunConfig::default());
        let b = SuiteReport::new("mii", RunConfig::default());
        let m = merge_reports(vec![a.clone(), b]).unwrap();
        assert_eq!(m.sections.len(), 2);
        assert!(m.passed);
        assert!(merge_reports(vec![]).is_err());
        assert!(merge_reports(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn csv_round_trips_through_json() {
        let t = Table {
            columns: vec!["p".into(), "n".into(), "ratio".into()],
            rows: vec![vec![0.5, 4.0, 4.0], vec![0.5, 16.0, 1.0 / 3.0]],
        };
        let csv = table_csv(&t).unwrap();
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
        let back = parse_table_csv(&csv).unwrap();
        assert_eq!(back, t);
        let json = to_json_string(&back).unwrap();
        let again: Table = serde_json::from_str(&json).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn csv_quotes_per_rfc4180() {
        let mut r = SuiteReport::new("s", RunConfig::default());
        r.push(Check::at_most("ratio, \"max\"", 1.0, 2.0));
        let csv = r.to_csv().unwrap();
        assert!(csv.contains("\"ratio, \"\"max\"\"\""));
    }
}
