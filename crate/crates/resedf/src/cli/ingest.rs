//! Reading datasets from delimiter-separated text.
//!
//! The expected header is `x1,...,xm,y,delta` for some `m >= 1`. The response
//! field may be left empty when `delta = 0` (it is stored as 0 and never
//! read); every other malformed field is rejected with its line number.

use crate::localpoly::{DataRow, Dataset};
use crate::{Error, Result};
use std::path::Path;

pub fn ingest_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let fail = |line: usize, message: String| Error::DataFormat {
        path: path_str.clone(),
        line,
        message,
    };

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| fail(1, "missing header".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let dimension = validate_header(&columns).ok_or_else(|| {
        fail(
            header_line,
            format!("header must be `x1,...,xm,y,delta`, got `{header}`"),
        )
    })?;

    let mut rows = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dimension + 2 {
            return Err(fail(
                line_no,
                format!("expected {} fields, got {}", dimension + 2, fields.len()),
            ));
        }
        let mut x = Vec::with_capacity(dimension);
        for (i, field) in fields[..dimension].iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                fail(line_no, format!("x{}: `{field}` is not a number", i + 1))
            })?;
            x.push(value);
        }
        let delta = match fields[dimension + 1] {
            "0" => false,
            "1" => true,
            other => {
                return Err(fail(
                    line_no,
                    format!("delta must be 0 or 1, got `{other}`"),
                ))
            }
        };
        let y_field = fields[dimension];
        let row = if delta {
            if y_field.is_empty() {
                return Err(fail(line_no, "y is empty but delta = 1".into()));
            }
            let y: f64 = y_field
                .parse()
                .map_err(|_| fail(line_no, format!("y: `{y_field}` is not a number")))?;
            DataRow::observed(x, y)
        } else {
            if !y_field.is_empty() {
                // tolerated: a stored value for a missing response is
                // ignored by every estimator, but it must still be numeric
                y_field.parse::<f64>().map_err(|_| {
                    fail(line_no, format!("y: `{y_field}` is not a number"))
                })?;
            }
            DataRow::missing(x)
        };
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(fail(header_line, "no data rows".into()));
    }
    Dataset::new(rows)
}

/// Checks `x1,...,xm,y,delta` and returns `m`.
fn validate_header(columns: &[&str]) -> Option<usize> {
    if columns.len() < 3 {
        return None;
    }
    let dimension = columns.len() - 2;
    for (i, name) in columns[..dimension].iter().enumerate() {
        if **name != format!("x{}", i + 1) {
            return None;
        }
    }
    (columns[dimension] == "y" && columns[dimension + 1] == "delta").then_some(dimension)
}
