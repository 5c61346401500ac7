//! Plain tables rendered as CSV, JSON or LaTeX.

use std::fmt;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Latex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(u64),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

pub const SKIPPED: &str = "SKIPPED";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra per-row metadata for JSON output only (for example checksums).
    pub provenance: Vec<Option<Value>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>, provenance: Option<Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
        self.provenance.push(provenance);
    }

    pub fn has_skipped(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .any(|c| matches!(c, Cell::Text(s) if s == SKIPPED))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Csv => self.csv()?,
            Format::Json => self.json()?,
            Format::Latex => self.latex(),
        })
    }

    fn csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_string))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .zip(&self.provenance)
            .map(|(row, prov)| {
                let mut obj = Map::new();
                for (h, c) in self.headers.iter().zip(row) {
                    let v = match c {
                        Cell::Int(n) => json!(n),
                        Cell::Text(s) => json!(s),
                        Cell::Empty => Value::Null,
                    };
                    obj.insert(h.clone(), v);
                }
                if let Some(p) = prov {
                    obj.insert("provenance".into(), p.clone());
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "table": self.name, "rows": rows }))?;
        s.push('\n');
        Ok(s)
    }

    fn latex(&self) -> String {
        let mut s = format!("\\begin{{tabular}}{{{}}}\n\\hline\n", "r".repeat(self.headers.len()));
        s.push_str(&self.headers.iter().map(|h| h.replace('_', "\\_")).collect::<Vec<_>>().join(" & "));
        s.push_str(" \\\\\n\\hline\n");
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(n) => group_thousands(*n),
                    other => other.to_string(),
                })
                .collect();
            s.push_str(&cells.join(" & "));
            s.push_str(" \\\\\n");
        }
        s.push_str("\\hline\n\\end{tabular}\n");
        s
    }
}

/// `1234567` as `1{,}234{,}567`.
fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push_str("{,}");
        }
        out.push(ch);
    }
    out
}
