//! Minimal CSV emission and parsing.
//!
//! Every floating-point value is written as `{:.16e}` (17 significant
//! digits, enough to round-trip an f64); undefined quantities print as
//! `NaN`. Iterate counters print as plain integers.

use std::fmt::Write as _;
use std::path::Path;

use spectraplex::learning::{RunRecord, RunResult};

use crate::error::{io_err, CliError, Result};

/// Format one value for a CSV cell.
pub fn cell(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Render a header and rows to CSV text (comma-separated, newline rows).
pub fn render(header: &[String], rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let _ = writeln!(text, "{}", row.join(","));
    }
    text
}

/// Write a CSV file.
pub fn write(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    std::fs::write(path, render(header, rows)).map_err(io_err(path))
}

/// Header for a per-seed trajectory file over an `n`-player game.
pub fn trajectory_header(players: usize) -> Vec<String> {
    let mut header = vec!["t".to_string(), "gap".to_string(), "bregman".to_string()];
    for i in 1..=players {
        header.push(format!("payoff_{i}"));
    }
    header.extend([
        "energy_residual".to_string(),
        "delta_t".to_string(),
        "gamma_t".to_string(),
    ]);
    header
}

fn trajectory_row(record: &RunRecord) -> Vec<String> {
    let mut row = vec![
        record.t.to_string(),
        cell(record.gap_avg),
        cell(record.bregman),
    ];
    row.extend(record.payoffs.iter().map(|&u| cell(u)));
    row.extend([
        cell(record.energy_residual),
        cell(record.delta),
        cell(record.gamma),
    ]);
    row
}

/// Rows of a trajectory file, thinned to every `stride`-th recorded iterate
/// with the final iterate always kept.
pub fn trajectory_rows(result: &RunResult, stride: usize) -> Vec<Vec<String>> {
    let last = result.records.len().saturating_sub(1);
    result
        .records
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx % stride == 0 || *idx == last)
        .map(|(_, record)| trajectory_row(record))
        .collect()
}

/// Parse a CSV file produced by [`write`] back into a header and numeric
/// rows (`NaN` cells parse as NaN).
pub fn read(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::BadFlag(format!("{}: empty CSV", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    CliError::BadFlag(format!(
                        "{}: line {}: {field:?} is not a number",
                        path.display(),
                        lineno + 2
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(CliError::BadFlag(format!(
                "{}: line {}: {} fields, header has {}",
                path.display(),
                lineno + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Index of a named column.
pub fn column(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::BadFlag(format!("CSV has no column {name:?}")))
}
