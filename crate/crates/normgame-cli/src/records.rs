//! Output records and their CSV/JSON emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// One threshold-sweep row. For plain sweeps `alpha0 = alpha1 = alpha`; for
/// future-inequality sweeps `alpha` carries the period-0 level `alpha0`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ThresholdRecord {
    pub n: usize,
    pub rho: f64,
    pub alpha: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta: f64,
    pub m: f64,
    pub delta_min: f64,
    pub sustainable: u8,
}

/// One norm-selection row.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NormRecord {
    pub n: usize,
    pub rho: f64,
    pub m: f64,
    pub alpha: f64,
    pub beta_star: Option<f64>,
    pub delta_min_at_star: f64,
}

/// One tax-optimization row.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TaxRecord {
    pub n: usize,
    pub rho: f64,
    pub s: f64,
    pub delta: f64,
    pub m: f64,
    pub beta: f64,
    pub alpha: f64,
    pub tau_star: f64,
    pub tau_dagger: Option<f64>,
    pub tau_a: f64,
    pub regime: String,
    pub welfare: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(name: &str) -> CliResult<Self> {
        match name {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Args(format!(
                "--format must be csv or json, got {other:?}"
            ))),
        }
    }
}

/// Serializes records to CSV (headers from the struct fields) or a JSON array.
/// Floats use the shortest exact representation, so parsing the file
/// reproduces every value bit-for-bit.
pub fn emit<T: Serialize>(records: &[T], format: OutputFormat) -> CliResult<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for record in records {
                writer
                    .serialize(record)
                    .map_err(|e| CliError::Io(format!("csv serialization failed: {e}")))?;
            }
            writer
                .into_inner()
                .map_err(|e| CliError::Io(format!("csv flush failed: {e}")))
        }
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(records)
                .map_err(|e| CliError::Io(format!("json serialization failed: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes bytes to the path, or to stdout when no path is given.
pub fn write_output(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

/// A parsed CSV table: header names plus rows of raw fields.
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| CliError::Io(format!("bad csv header: {e}")))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| CliError::Io(format!("bad csv row: {e}")))?;
            rows.push(row.iter().map(str::to_owned).collect());
        }
        Ok(Self { headers, rows })
    }

    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Args(format!("column {name:?} not present in input")))
    }
}
