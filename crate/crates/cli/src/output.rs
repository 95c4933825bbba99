//! Tabular datasets with a manifest, written as CSV or JSON.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{json, Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    /// Empty CSV field, JSON null.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}
impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}
impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::S(x.to_string())
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::F(x) => write!(f, "{x:?}"),
            Cell::I(x) => write!(f, "{x}"),
            Cell::S(s) => f.write_str(s),
            Cell::Missing => Ok(()),
        }
    }
}

impl Cell {
    fn to_json(&self) -> Json {
        match self {
            // JSON has no inf/nan
            Cell::F(x) if !x.is_finite() => Json::String(format!("{x:?}")),
            Cell::F(x) => json!(x),
            Cell::I(x) => json!(x),
            Cell::S(s) => json!(s),
            Cell::Missing => Json::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }
}

/// Resolved command parameters plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        // SOURCE_DATE_EPOCH pins the stamp for reproducible files
        let ts = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        let mut m = Self { entries: Vec::new() };
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m.set("timestamp_unix", ts);
        m
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub manifest: Manifest,
    pub tables: Vec<Table>,
}

impl Dataset {
    pub fn new(manifest: Manifest) -> Self {
        Self { manifest, tables: Vec::new() }
    }

    pub fn with(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.manifest.entries {
            writeln!(w, "# {k}={v}")?;
        }
        let multi = self.tables.len() > 1;
        for t in &self.tables {
            if multi {
                writeln!(w, "# table={}", t.name)?;
            }
            let mut cw = csv::WriterBuilder::new().from_writer(&mut *w);
            cw.write_record(&t.columns)?;
            for r in &t.rows {
                cw.write_record(r.iter().map(|c| c.to_string()))?;
            }
            cw.flush()?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Json {
        let manifest: Map<String, Json> =
            self.manifest.entries.iter().map(|(k, v)| (k.clone(), Json::String(v.clone()))).collect();
        let tables: Map<String, Json> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Json> = t
                    .rows
                    .iter()
                    .map(|r| Json::Object(t.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect()))
                    .collect();
                (t.name.clone(), Json::Array(rows))
            })
            .collect();
        json!({ "manifest": manifest, "tables": tables })
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let mut w: Box<dyn Write> = match out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        match format {
            Format::Csv => self.write_csv(&mut w)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.to_json())?;
                writeln!(w)?;
            }
        }
        w.flush()
    }
}
