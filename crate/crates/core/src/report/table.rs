//! Table schemas and the CSV writer.
//!
//! Every CSV the tool emits goes through a TableSchema so column order and
//! numeric precision are part of the contract. The default numeric format is
//! 7 significant digits, which exceeds the 6-decimal precision of the
//! published tables.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberFormat {
    /// significant digits, e.g. Sig(7) -> 0.001060942
    Sig(u8),
    /// fixed decimal places, e.g. Fixed(6) -> 0.001061
    Fixed(u8),
    Int,
    Text,
}

pub const DEFAULT_SIG_DIGITS: u8 = 7;

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
    pub format: NumberFormat,
}

impl Column {
    pub fn num(name: &'static str, unit: &'static str) -> Self {
        Column {
            name,
            unit,
            format: NumberFormat::Sig(DEFAULT_SIG_DIGITS),
        }
    }

    pub fn fixed(name: &'static str, unit: &'static str, places: u8) -> Self {
        Column {
            name,
            unit,
            format: NumberFormat::Fixed(places),
        }
    }

    pub fn int(name: &'static str, unit: &'static str) -> Self {
        Column {
            name,
            unit,
            format: NumberFormat::Int,
        }
    }

    pub fn text(name: &'static str) -> Self {
        Column {
            name,
            unit: "",
            format: NumberFormat::Text,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSchema {
    pub name: &'static str,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Num(f64),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Formats a float to `sig` significant digits without trailing zero noise.
/// Falls back to scientific notation outside [1e-4, 1e15).
pub fn format_sig(v: f64, sig: u8) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sig = sig.max(1) as i32;
    let mag = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{:.*e}", (sig - 1) as usize, v);
    }
    let decimals = (sig - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

impl TableSchema {
    pub fn new(name: &'static str, columns: Vec<Column>) -> Self {
        TableSchema { name, columns }
    }

    pub fn format_cell(&self, col: usize, cell: &Cell) -> String {
        match (&self.columns[col].format, cell) {
            (NumberFormat::Sig(s), Cell::Num(v)) => format_sig(*v, *s),
            (NumberFormat::Fixed(p), Cell::Num(v)) => format!("{v:.*}", *p as usize),
            (_, Cell::Num(v)) => format_sig(*v, DEFAULT_SIG_DIGITS),
            (_, Cell::Int(v)) => v.to_string(),
            (_, Cell::Text(t)) => t.clone(),
        }
    }

    /// Writes a header row plus formatted data rows.
    pub fn write_csv<W: Write>(&self, rows: &[Vec<Cell>], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name))?;
        for row in rows {
            debug_assert_eq!(row.len(), self.columns.len(), "schema {}", self.name);
            let formatted: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, cell)| self.format_cell(i, cell))
                .collect();
            w.write_record(&formatted)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, rows: &[Vec<Cell>], path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(rows, file)
    }
}

/// One JSON document per report.
pub fn write_json_file<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    Ok(())
}
