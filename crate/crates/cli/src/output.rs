//! CSV tables with a `#` provenance preamble.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            // Errors may contain commas; keep the column count fixed.
            Cell::Text(s) => s.replace([',', '\n'], ";"),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

/// Scientific notation with 15 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.14e}")
    }
}

pub struct Table {
    pub preamble: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(preamble: Vec<String>, columns: Vec<&'static str>) -> Self {
        Table {
            preamble,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        for line in &self.preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path, name: &str) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut w = io::BufWriter::new(fs::File::create(&path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_keeps_fifteen_digits() {
        assert_eq!(format_float(0.1), "1.00000000000000e-1");
        assert_eq!(format_float(-2.5e10), "-2.50000000000000e10");
        assert_eq!(format_float(1.0 / 3.0).parse::<f64>().unwrap(), 0.333333333333333);
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(vec!["a = 1".into()], vec!["x", "note"]);
        t.push(vec![Cell::Num(1.0), Cell::Text("bad, row".into())]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# a = 1\nx,note\n1.00000000000000e0,bad; row\n");
    }
}
