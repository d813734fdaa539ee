//! CSV emission: header row, comma separators, 17 significant digits so
//! every double round-trips losslessly.

use std::io::Write;
use std::path::Path;

/// Format one value with 17 significant digits.
pub fn fmt(value: f64) -> String {
    format!("{value:.16e}")
}

/// Write a table with the given column names.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let line: Vec<String> = row.iter().map(|v| fmt(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}
