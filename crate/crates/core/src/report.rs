// SPDX-License-Identifier: Apache-2.0

//! Tabular results and the provenance header written ahead of them.
//!
//! Output files start with `# key: value` manifest lines followed by a plain
//! CSV table. Numbers use Rust's shortest round-trip formatting, which is
//! locale independent and always uses `.` as the decimal separator.

use std::fmt;
use std::io::{self, Write};

/// Prefix of every manifest line.
pub const MANIFEST_PREFIX: &str = "# ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Float(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(v) => f.write_str(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Fixed-column result table. The header row is always written, even when
/// there are no data rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Panics when the row width does not match the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// Provenance metadata stamped on every output artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    /// Hex digest of the input scenario, when the command has one.
    pub scenario_digest: Option<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    /// ISO-8601, UTC.
    pub timestamp: String,
}

impl RunManifest {
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("command", self.command.clone()),
            (
                "scenario_digest",
                self.scenario_digest
                    .as_ref()
                    .map_or_else(|| "none".to_owned(), |d| format!("sha256:{d}")),
            ),
            (
                "seed",
                self.seed
                    .map_or_else(|| "none".to_owned(), |s| s.to_string()),
            ),
            ("tool_version", self.tool_version.clone()),
            ("timestamp", self.timestamp.clone()),
        ]
    }

    pub fn write_header<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{MANIFEST_PREFIX}fogscope run manifest")?;
        for (key, value) in self.entries() {
            writeln!(out, "{MANIFEST_PREFIX}{key}: {value}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries()
            .into_iter()
            .map(|(k, v)| (k.to_owned(), serde_json::Value::String(v)))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Manifest header followed by the CSV table.
pub fn render_artifact(manifest: &RunManifest, table: &ResultTable) -> String {
    let mut buf = Vec::new();
    manifest
        .write_header(&mut buf)
        .expect("writing to memory cannot fail");
    table
        .write_csv(&mut buf)
        .expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("artifact is UTF-8")
}

/// Drops leading manifest lines, leaving the bare CSV.
pub fn strip_manifest(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with(MANIFEST_PREFIX) {
        rest = rest.split_once('\n').map_or("", |(_, tail)| tail);
    }
    rest
}
