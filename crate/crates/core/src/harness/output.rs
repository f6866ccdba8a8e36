//! CSV tables and atomic file output.

use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

/// A header plus rows of numbers, printed with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Shape(format!(
                "row of {} values for {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Builds a table from equally long columns.
    pub fn from_columns(header: &[&str], columns: &[&[f64]]) -> Result<Self> {
        let mut t = Self::new(header);
        let n = columns.first().map_or(0, |c| c.len());
        if columns.len() != header.len() || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Shape("columns must match the header and each other".into()));
        }
        for i in 0..n {
            t.rows.push(columns.iter().map(|c| c[i]).collect());
        }
        Ok(t)
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_values() {
        let mut t = Table::new(&["t", "x"]);
        t.push(vec![0.1, 1.0 / 3.0]).unwrap();
        t.push(vec![0.2, -2.5e-300]).unwrap();
        assert!(t.push(vec![1.0]).is_err());
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x"));
        for (line, row) in lines.zip(t.rows()) {
            let parsed: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(&parsed, row);
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
