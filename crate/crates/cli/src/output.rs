//! Tabular artifacts and their CSV/JSON encodings.
//!
//! Floats always carry six decimals in CSV and are rounded to six decimals
//! in JSON, so both encodings hold the same numbers. Column order is the
//! JSON key order.

use serde_json::{Map, Number, Value};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    /// Value undefined at this point, e.g. outside a model's domain.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<u8> for Cell {
    fn from(x: u8) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Six-decimal rendering with negative zero folded to zero.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fixed6(*x),
            Cell::Num(_) | Cell::Missing => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Number::from_f64(round6(*x)).map_or(Value::Null, Value::Number),
            Cell::Missing => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(t) => Value::String(t.clone()),
        }
    }
}

/// A header plus rows. A single-row table renders as a JSON object rather
/// than an array when it is marked as a record.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub record: bool,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), record: false }
    }

    pub fn record(fields: Vec<(&str, Cell)>) -> Self {
        let (cols, row): (Vec<_>, Vec<_>) = fields.into_iter().unzip();
        let mut t = Self::new(&cols);
        t.rows.push(row);
        t.record = true;
        t
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json_value(&self) -> Value {
        let obj = |row: &Vec<Cell>| {
            let m: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            Value::Object(m)
        };
        if self.record && self.rows.len() == 1 {
            obj(&self.rows[0])
        } else {
            Value::Array(self.rows.iter().map(obj).collect())
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("tables serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Writes `table` to `dir/name.ext`, returning the file name.
pub fn write_table(dir: &Path, name: &str, table: &Table, format: Format) -> std::io::Result<String> {
    let file = format!("{name}.{}", format.extension());
    std::fs::write(dir.join(&file), table.render(format))?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_six_decimals() {
        let mut t = Table::new(&["x", "label"]);
        t.push(vec![Cell::Num(-1e-9), "a,b".into()]);
        assert_eq!(t.to_csv(), "x,label\n0.000000,\"a,b\"\n");
    }

    #[test]
    fn record_renders_as_object_in_column_order() {
        let t = Table::record(vec![("z", 1.0.into()), ("a", 0.9997558.into())]);
        assert_eq!(t.render(Format::Json), "{\n  \"z\": 1.0,\n  \"a\": 0.999756\n}\n");
    }
}
