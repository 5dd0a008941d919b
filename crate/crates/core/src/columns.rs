//! Whitespace-separated columnar text with a `name[unit]` header row.

use std::io::{self, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnTable {
    columns: Vec<Column>,
}

impl ColumnTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if let Some(first) = columns.first() {
            let n = first.values.len();
            if let Some(bad) = columns.iter().find(|c| c.values.len() != n) {
                return Err(Error::LengthMismatch(format!(
                    "column {} has {} rows, expected {n}",
                    bad.name,
                    bad.values.len()
                )));
            }
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Values are written with `{:.17e}`, which round-trips every f64.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}[{}]", c.name, c.unit))
            .collect();
        writeln!(w, "{}", header.join(" "))?;
        for row in 0..self.rows() {
            let mut first = true;
            for c in &self.columns {
                if !first {
                    w.write_all(b" ")?;
                }
                first = false;
                write!(w, "{:.17e}", c.values[row])?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table text is ASCII")
    }

    /// Parse text produced by [`ColumnTable::write_to`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty table".into()))?;
        let mut columns = Vec::new();
        for field in header.split_whitespace() {
            let (name, unit) = field
                .strip_suffix(']')
                .and_then(|f| f.split_once('['))
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("header field {field:?} is not name[unit]"))
                })?;
            columns.push(Column::new(name, unit, Vec::new()));
        }
        for (lineno, line) in lines.enumerate() {
            let values: Vec<&str> = line.split_whitespace().collect();
            if values.len() != columns.len() {
                return Err(Error::LengthMismatch(format!(
                    "row {} has {} fields, header has {}",
                    lineno + 1,
                    values.len(),
                    columns.len()
                )));
            }
            for (c, v) in columns.iter_mut().zip(values) {
                let x = v.parse::<f64>().map_err(|e| {
                    Error::InvalidParameter(format!("row {}: {v:?}: {e}", lineno + 1))
                })?;
                c.values.push(x);
            }
        }
        Self::new(columns)
    }
}
