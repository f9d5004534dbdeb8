//! Reading a numeric series from CSV.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Opens `path`, or stdin for `-`.
pub fn open(path: &Path) -> CliResult<Box<dyn Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin()));
    }
    File::open(path)
        .map(|f| Box::new(f) as Box<dyn Read>)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

/// Extracts one numeric column. Lines starting with `#` are skipped. A first
/// row that does not parse as numbers is taken as the header. Without
/// `column`, single-column input is used as-is and multi-column input falls
/// back to a column named `y`.
pub fn read_series<R: Read>(source: R, column: Option<&str>) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut records = reader.records();
    let Some(first) = records.next().transpose()? else {
        return Err(CliError::Data("input contains no data rows".into()));
    };
    let is_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let header: Option<Vec<String>> = is_header.then(|| first.iter().map(str::to_string).collect());
    let width = first.len();

    let index = match (column, &header) {
        (Some(name), Some(h)) => h
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Data(format!("column {name:?} not found; header has {}", h.join(", "))))?,
        (Some(name), None) => {
            return Err(CliError::Data(format!(
                "column {name:?} requested but the input has no header row"
            )))
        }
        (None, _) if width == 1 => 0,
        (None, Some(h)) => h.iter().position(|c| c == "y").ok_or_else(|| {
            CliError::Data(format!(
                "input has {width} columns; choose one with --column ({})",
                h.join(", ")
            ))
        })?,
        (None, None) => {
            return Err(CliError::Data(format!(
                "input has {width} columns and no header; expected a single numeric column"
            )))
        }
    };

    let mut values = Vec::new();
    let mut push = |record: &csv::StringRecord| -> CliResult<()> {
        let line = record.position().map_or(0, |p| p.line());
        let field = record
            .get(index)
            .ok_or_else(|| CliError::Data(format!("line {line}: missing column {}", index + 1)))?;
        let v: f64 = field
            .parse()
            .map_err(|_| CliError::Data(format!("line {line}: non-numeric value {field:?}")))?;
        if !v.is_finite() {
            return Err(CliError::Data(format!("line {line}: non-finite value {field:?}")));
        }
        values.push(v);
        Ok(())
    };
    if header.is_none() {
        push(&first)?;
    }
    for record in records {
        push(&record?)?;
    }
    if values.is_empty() {
        return Err(CliError::Data("input contains no data rows".into()));
    }
    Ok(values)
}
