//! Two-column numeric CSV input.

use std::path::Path;

use crate::error::{Error, Result};

/// How to treat the first row of an input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Skip the first row only if it does not parse as two numbers.
    #[default]
    Auto,
    Present,
    Absent,
}

fn parse_row(line: &str) -> Option<(f64, f64)> {
    let mut fields = line.split(',');
    let a = fields.next()?.trim().parse::<f64>().ok()?;
    let b = fields.next()?.trim().parse::<f64>().ok()?;
    if fields.next().map(|f| !f.trim().is_empty()).unwrap_or(false) {
        return None;
    }
    Some((a, b))
}

/// Read a two-column numeric CSV file.
pub fn read_two_column_csv(path: &Path, header: HeaderMode) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    if let Some((lineno, first)) = lines.next() {
        match header {
            HeaderMode::Present => {}
            HeaderMode::Absent => match parse_row(first) {
                Some(row) => rows.push(row),
                None => {
                    return Err(Error::MalformedData(format!(
                        "line {}: expected two numeric fields, got: {first}",
                        lineno + 1
                    )))
                }
            },
            HeaderMode::Auto => {
                if let Some(row) = parse_row(first) {
                    rows.push(row);
                }
            }
        }
    }
    for (lineno, line) in lines {
        match parse_row(line) {
            Some(row) => rows.push(row),
            None => {
                return Err(Error::MalformedData(format!(
                    "line {}: expected two numeric fields, got: {line}",
                    lineno + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::MalformedData("no data rows".into()));
    }
    Ok(rows)
}
