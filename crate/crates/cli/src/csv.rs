//! Minimal CSV output: a header row, comma separators, LF line endings and
//! floats with 17 significant digits (enough to round-trip every `f64`).

use std::fmt::Write as _;

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut text = String::new();
        let names: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
        writeln!(text, "{}", names.join(",")).unwrap();
        Self {
            text,
            columns: names.len(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_float(*v)).collect();
        self.cells(&cells);
    }

    /// A row of pre-formatted cells (text or empty fields allowed).
    pub fn cells<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.columns, "row width");
        let cells: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        writeln!(self.text, "{}", cells.join(",")).unwrap();
    }

    /// Trailing row of a different shape, e.g. a fitted summary value.
    pub fn summary(&mut self, label: &str, value: f64) {
        writeln!(self.text, "{label},{}", fmt_float(value)).unwrap();
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Parsed CSV: header names and rows of cells (numeric cells as `f64`).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.split_terminator('\n');
        let header = lines
            .next()
            .ok_or("empty input")?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|line| {
                line.split(',')
                    .map(|c| match c.parse::<f64>() {
                        Ok(v) => Cell::Number(v),
                        Err(_) => Cell::Text(c.to_string()),
                    })
                    .collect()
            })
            .collect();
        Ok(Self { header, rows })
    }

    /// Re-emits in the canonical output format.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Number(v) => fmt_float(*v),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        self.rows
            .iter()
            .map(|r| match r.get(i) {
                Some(Cell::Number(v)) => Some(*v),
                _ => None,
            })
            .collect()
    }
}
