//! Rendering of command results as aligned text, CSV or JSON.
//!
//! A report is rendered in full before anything is written, so a failing
//! command leaves no partial output behind.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format [default: table, csv for curves]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Rows plus a JSON rendering of the same result.
#[derive(Debug, Clone)]
pub struct Report {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    json: String,
    /// Two-column `field,value` layout; the table form omits the header.
    keyed: bool,
}

impl Report {
    pub fn fields(pairs: Vec<(&str, String)>, json: &impl Serialize) -> Self {
        Report {
            columns: vec!["field".into(), "value".into()],
            rows: pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect(),
            json: to_json(json),
            keyed: true,
        }
    }

    pub fn rows(columns: &[&str], rows: Vec<Vec<String>>, json: &impl Serialize) -> Self {
        Report {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            json: to_json(json),
            keyed: false,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => format!("{}\n", self.json),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8")
            }
            Format::Table => self.render_table(),
        })
    }

    fn render_table(&self) -> String {
        let header = (!self.keyed).then_some(&self.columns);
        let mut widths = vec![0; self.columns.len()];
        for row in header.into_iter().chain(&self.rows) {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in header.into_iter().chain(&self.rows) {
            let last = row.len().saturating_sub(1);
            for (i, cell) in row.iter().enumerate() {
                if i == last {
                    out.push_str(cell);
                } else {
                    out.push_str(&format!("{cell:<width$}  ", width = widths[i]));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports contain only finite, serializable values")
}

/// Renders `report` and writes it to the requested destination.
pub fn emit(out: &OutputArgs, report: &Report, default: Format) -> Result<()> {
    let text = report.render(out.format.unwrap_or(default))?;
    match &out.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Shortest round-trip decimal form, in exponent notation below `1e-5`.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-5 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
