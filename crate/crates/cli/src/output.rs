//! CSV tables with `#` metadata header lines.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};
use smallcell::config::SystemConfig;

use crate::Failure;

/// Version of the column layout; bump when columns change.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.push_text(row.into_iter().map(|v| v.to_string()).collect());
    }

    pub fn push_text(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// SHA-256 of the compact JSON form of the configuration.
pub fn config_hash(cfg: &SystemConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Io(e.to_string())
}

pub fn write_raw(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut out = sink(path)?;
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    out.flush().map_err(io_failure)
}

pub fn write_table(path: Option<&Path>, command: &str, cfg: &SystemConfig, table: &Table) -> Result<(), Failure> {
    let mut out = sink(path)?;
    writeln!(out, "# schema: smallcell-csv/{SCHEMA_VERSION}").map_err(io_failure)?;
    writeln!(out, "# version: smallcell {}", env!("CARGO_PKG_VERSION")).map_err(io_failure)?;
    writeln!(out, "# command: {command}").map_err(io_failure)?;
    writeln!(out, "# config_sha256: {}", config_hash(cfg)).map_err(io_failure)?;
    writeln!(out, "# seed: {}", cfg.base_seed).map_err(io_failure)?;
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(&table.columns).map_err(io_failure)?;
    for row in &table.rows {
        csv.write_record(row).map_err(io_failure)?;
    }
    csv.flush().map_err(io_failure)
}
