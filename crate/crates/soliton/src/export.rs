//! Deterministic CSV/JSON table export.
//!
//! Identical inputs produce byte-identical files: no timestamps, fixed
//! 17-significant-digit float formatting, '\n' line endings, and the tool
//! version under a separate metadata key.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A column-named table of f64 rows.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.columns.join(",").as_bytes())?;
        w.write_all(b"\n")?;
        for row in &self.rows {
            let line = row
                .iter()
                .map(|x| format_float(*x))
                .collect::<Vec<_>>()
                .join(",");
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Wrapper serialized for JSON table output.
#[derive(Serialize)]
struct JsonDocument<'a, T: Serialize> {
    metadata: Metadata,
    #[serde(flatten)]
    payload: &'a T,
}

#[derive(Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
}

fn metadata() -> Metadata {
    Metadata {
        tool: "soliton",
        version: env!("CARGO_PKG_VERSION"),
    }
}

pub fn to_json_string<T: Serialize>(payload: &T) -> String {
    let doc = JsonDocument {
        metadata: metadata(),
        payload,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Write to a file, or stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, content: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(content)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content)?;
            lock.flush()
        }
    }
}
