//! Machine-readable experiment reports.
//!
//! Every experiment emits the same shape: the configuration it ran under
//! (echoed verbatim so a report is self-describing), a rectangular table
//! of per-item rows, and a summary of key/value metrics, each of which is
//! recomputable from the rows. Reports render to CSV or JSON; both
//! renderings are deterministic, so identical runs produce byte-identical
//! files. Wall-clock time is kept on the struct for diagnostics but never
//! serialized, precisely to preserve that byte-identity.

use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use std::fmt;
use std::time::Duration;

/// One table or summary cell.
#[derive(Clone, Debug, PartialEq)]
pub enum CellValue {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

/// Compact, parse-roundtrippable float rendering: plain decimal in the
/// human range, exponent notation outside it.
fn format_float(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() && (1e-4..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Int(v) => write!(f, "{v}"),
            CellValue::UInt(v) => write!(f, "{v}"),
            CellValue::Float(v) => write!(f, "{}", format_float(*v)),
            CellValue::Bool(v) => write!(f, "{v}"),
            CellValue::Text(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for CellValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CellValue::Int(v) => s.serialize_i64(*v),
            CellValue::UInt(v) => s.serialize_u64(*v),
            CellValue::Float(v) => s.serialize_f64(*v),
            CellValue::Bool(v) => s.serialize_bool(*v),
            CellValue::Text(v) => s.serialize_str(v),
        }
    }
}

impl From<f64> for CellValue {
    fn from(v: f64) -> CellValue {
        CellValue::Float(v)
    }
}

impl From<i64> for CellValue {
    fn from(v: i64) -> CellValue {
        CellValue::Int(v)
    }
}

impl From<u64> for CellValue {
    fn from(v: u64) -> CellValue {
        CellValue::UInt(v)
    }
}

impl From<usize> for CellValue {
    fn from(v: usize) -> CellValue {
        CellValue::UInt(v as u64)
    }
}

impl From<bool> for CellValue {
    fn from(v: bool) -> CellValue {
        CellValue::Bool(v)
    }
}

impl From<&str> for CellValue {
    fn from(v: &str) -> CellValue {
        CellValue::Text(v.to_string())
    }
}

impl From<String> for CellValue {
    fn from(v: String) -> CellValue {
        CellValue::Text(v)
    }
}

/// Ordered key/value view of the configuration a run executed under.
///
/// Insertion order is preserved; the canonical form `k=v k=v ...` heads
/// every CSV report and the JSON rendering keeps the same key order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pairs: Vec<(String, CellValue)>,
}

impl RunConfig {
    pub fn new() -> RunConfig {
        RunConfig::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<CellValue>) {
        self.pairs.push((key.to_string(), value.into()));
    }

    pub fn pairs(&self) -> &[(String, CellValue)] {
        &self.pairs
    }

    /// Space-separated `key=value` list in insertion order.
    pub fn canonical(&self) -> String {
        self.pairs
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Serialize for RunConfig {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.pairs.len()))?;
        for (k, v) in &self.pairs {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// A complete experiment output: configuration echo, row table, summary
/// metrics, clamp-guard count, and (unserialized) wall time.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<CellValue>>,
    pub summary: Vec<(String, CellValue)>,
    pub clamp_count: usize,
    /// Diagnostic only; excluded from CSV/JSON so identical runs stay
    /// byte-identical.
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn new(config: RunConfig, columns: Vec<String>) -> ExperimentReport {
        ExperimentReport {
            config,
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            clamp_count: 0,
            wall_time: Duration::ZERO,
        }
    }

    pub fn push_row(&mut self, row: Vec<CellValue>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn push_summary(&mut self, key: &str, value: impl Into<CellValue>) {
        self.summary.push((key.to_string(), value.into()));
    }

    /// Summary value by key, if present.
    pub fn summary_value(&self, key: &str) -> Option<&CellValue> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }

    /// CSV rendering: `# config:` line, header line, data rows, then
    /// `# summary:` and `# clamp_count:` trailer comments.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# config: ");
        out.push_str(&self.config.canonical());
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line = row
                .iter()
                .map(csv_cell)
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&line);
            out.push('\n');
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary: {k}={v}\n"));
        }
        out.push_str(&format!("# clamp_count: {}\n", self.clamp_count));
        out
    }

    /// JSON rendering mirroring the CSV structure.
    pub fn to_json(&self) -> String {
        let mut out =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        out.push('\n');
        out
    }
}

fn csv_cell(cell: &CellValue) -> String {
    let raw = cell.to_string();
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

impl Serialize for ExperimentReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Summary<'a>(&'a [(String, CellValue)]);
        impl Serialize for Summary<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
        struct Rows<'a>(&'a [Vec<CellValue>]);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for row in self.0 {
                    seq.serialize_element(row)?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("ExperimentReport", 5)?;
        st.serialize_field("config", &self.config)?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &Rows(&self.rows))?;
        st.serialize_field("summary", &Summary(&self.summary))?;
        st.serialize_field("clamp_count", &self.clamp_count)?;
        st.end()
    }
}
