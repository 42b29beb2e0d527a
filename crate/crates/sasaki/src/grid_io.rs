//! Grid-field CSV: header `alpha,theta`, one sample per row, radians,
//! strictly increasing latitudes.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use sasaki_core::fields::AngleField;
use sasaki_core::optimizer::Profile;
use sasaki_core::sphere::AnnulusSpec;

use crate::error::CliError;

pub const HEADER: [&str; 2] = ["alpha", "theta"];

#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    pub alphas: Vec<f64>,
    pub thetas: Vec<f64>,
}

fn parse_error(path: &str, reason: impl Into<String>) -> CliError {
    CliError::GridParse { path: path.to_string(), reason: reason.into() }
}

/// Parses grid CSV from a reader. `label` names the source in errors.
pub fn parse_grid<R: Read>(reader: R, label: &str) -> Result<GridSamples, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(label, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(parse_error(label, "header must be exactly `alpha,theta`"));
    }
    let mut samples = GridSamples { alphas: Vec::new(), thetas: Vec::new() };
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| parse_error(label, e.to_string()))?;
        let line = i + 2;
        if row.len() != 2 {
            return Err(parse_error(label, format!("line {line}: expected 2 fields")));
        }
        let field = |j: usize| -> Result<f64, CliError> {
            let v: f64 = row[j]
                .parse()
                .map_err(|_| parse_error(label, format!("line {line}: `{}` is not a number", &row[j])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_error(label, format!("line {line}: value must be finite")))
            }
        };
        let (alpha, theta) = (field(0)?, field(1)?);
        if let Some(&prev) = samples.alphas.last() {
            if !(alpha > prev) {
                return Err(parse_error(label, format!("line {line}: alpha must increase strictly")));
            }
        }
        samples.alphas.push(alpha);
        samples.thetas.push(theta);
    }
    if samples.alphas.len() < 2 {
        return Err(parse_error(label, "at least two samples are required"));
    }
    Ok(samples)
}

pub fn read_grid(path: &Path) -> Result<GridSamples, CliError> {
    let label = path.display().to_string();
    let file = File::open(path).map_err(|e| parse_error(&label, e.to_string()))?;
    parse_grid(file, &label)
}

/// Reads a grid file and builds the field on `a`; range errors count as
/// parse failures.
pub fn load_grid_field(path: &Path, a: AnnulusSpec) -> Result<AngleField, CliError> {
    let s = read_grid(path)?;
    AngleField::grid(a, s.alphas, s.thetas)
        .map_err(|e| parse_error(&path.display().to_string(), e.to_string()))
}

/// Writes samples with shortest round-trip formatting, so reading back
/// reproduces every value bit for bit.
pub fn write_grid<W: Write>(writer: W, alphas: &[f64], thetas: &[f64]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER).map_err(csv_io)?;
    for (a, t) in alphas.iter().zip(thetas) {
        w.write_record([a.to_string(), t.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_profile(path: &Path, p: &Profile) -> Result<(), CliError> {
    write_grid(File::create(path)?, p.nodes(), p.thetas())
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
