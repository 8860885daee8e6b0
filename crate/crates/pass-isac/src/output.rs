//! CSV and JSON writers. Every CSV starts with the schema line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pass_isac_core::monte_carlo::RateRow;
use pass_isac_core::RateRegion;
use serde::Serialize;

use crate::CliError;

pub const SCHEMA_HEADER: &str = "# pass-isac v1";

#[derive(Debug, Serialize)]
struct RateRecord<'a> {
    sweep_value: f64,
    design: &'a str,
    case: &'a str,
    mean_cr: f64,
    mean_sr: f64,
    se_cr: f64,
    se_sr: f64,
    completed: usize,
    failed: usize,
}

#[derive(Debug, Serialize)]
struct Vertex {
    cr: f64,
    sr: f64,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?);
    writeln!(w, "{SCHEMA_HEADER}").map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(w)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path.display().to_string(), e.into())
}

fn write_records<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn write_rates_csv(path: &Path, rows: &[&RateRow]) -> Result<(), CliError> {
    write_records(
        path,
        rows.iter().map(|r| RateRecord {
            sweep_value: r.sweep_value,
            design: r.design.label(),
            case: r.case.label(),
            mean_cr: r.summary.mean.cr,
            mean_sr: r.summary.mean.sr,
            se_cr: r.summary.std_error.cr,
            se_sr: r.summary.std_error.sr,
            completed: r.summary.completed,
            failed: r.summary.failed,
        }),
    )
}

/// Boundary vertices, from the SR axis to the CR axis.
pub fn write_region_csv(path: &Path, region: &RateRegion) -> Result<(), CliError> {
    write_records(path, region.vertices().iter().map(|p| Vertex { cr: p.cr, sr: p.sr }))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path.display().to_string(), e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path.display().to_string(), e))
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub command: String,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";
