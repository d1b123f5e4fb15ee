use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// The result of one command in all three output shapes.
pub struct Report {
    pub json: Value,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Replaces the aligned-column rendering of `rows` in table format.
    pub table: Option<String>,
    /// Set when only part of the request could be certified.
    pub incomplete: Option<String>,
    /// Set when a check inside the command failed.
    pub failed: Option<String>,
}

impl Report {
    pub fn new(json: Value, headers: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report {
            json,
            headers,
            rows,
            table: None,
            incomplete: None,
            failed: None,
        }
    }

    pub fn with_table(mut self, text: String) -> Self {
        self.table = Some(text);
        self
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Table => match &self.table {
                Some(text) => writeln!(out, "{text}")?,
                None => write_aligned(&self.headers, &self.rows, out)?,
            },
        }
        Ok(())
    }
}

fn write_aligned(headers: &[&str], rows: &[Vec<String>], out: &mut impl Write) -> Result<()> {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(headers.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}
