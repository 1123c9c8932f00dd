//! Tabular output as CSV or a JSON summary document.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{CliError, OutputFormat, RunConfig};
use crate::verify::write_csv;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(i) => json!(i),
            Cell::Text(s) if s.is_empty() => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::Io(io::Error::other(e));
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self, command: &str, cfg: &RunConfig) -> Value {
        json!({
            "command": command,
            "family": cfg.family.name(),
            "map": cfg.map.to_string(),
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Chart coordinates as leading cells.
pub fn point_cells(coords: &[f64]) -> Vec<Cell> {
    coords.iter().map(|&x| Cell::Num(x)).collect()
}

pub fn point_columns(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

/// `--out`, else `<out_dir>/<stem>.<ext>`, else stdout (`None`).
pub fn destination(cfg: &RunConfig, stem: &str, format: OutputFormat) -> Option<PathBuf> {
    cfg.out.clone().or_else(|| cfg.out_dir.as_ref().map(|d| d.join(format!("{stem}.{}", format.extension()))))
}

fn open(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

pub fn emit_table(table: &Table, command: &str, cfg: &RunConfig) -> Result<(), CliError> {
    let stem = format!("{command}-{}", cfg.family.name());
    let mut out = open(destination(cfg, &stem, cfg.format).as_deref())?;
    match cfg.format {
        OutputFormat::Csv => table.write_csv(&mut out)?,
        OutputFormat::Summary => emit_json(&table.summary(command, cfg), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn emit_json<W: Write>(value: &Value, mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Io(io::Error::other(e)))?;
    writeln!(out)?;
    Ok(())
}

pub fn emit_residuals(reports: &[crate::verify::ResidualReport], dim: usize, path: Option<&Path>) -> Result<(), CliError> {
    let mut out = open(path)?;
    write_csv(reports, dim, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn emit_summary(value: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let mut out = open(path)?;
    emit_json(value, &mut out)?;
    out.flush()?;
    Ok(())
}
