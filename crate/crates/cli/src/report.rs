//! CSV report schemas. Every report carries a `schema_version` column so
//! downstream parsers can detect format changes.

use std::io::Write;

use serde::Serialize;

use crate::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// One row of the simulation report: aggregates for a
/// (signal, rsnr, estimator) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationRow {
    pub schema_version: u32,
    pub signal: String,
    pub rsnr: f64,
    pub estimator: String,
    pub median_mse: f64,
    pub relative_median_mse: f64,
    pub mean_surviving_pct: f64,
    pub replications: usize,
    pub seed: u64,
}

/// One row of the function-mode rate report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionRateRow {
    pub schema_version: u32,
    pub mode: String,
    pub signal: String,
    pub estimator: String,
    pub m: f64,
    pub rsnr: f64,
    pub n: usize,
    pub median_risk: f64,
    pub slope: f64,
}

/// One row of the ball-mode rate report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallRateRow {
    pub schema_version: u32,
    pub mode: String,
    pub p: f64,
    pub eta_scale: f64,
    pub alpha: f64,
    pub n: usize,
    pub zone: String,
    pub mc_risk: f64,
    pub minimax_rate: f64,
    pub ratio: f64,
    pub slope: f64,
}

/// Serialize rows to CSV with a header.
pub fn write_csv<R: Serialize, W: Write>(rows: &[R], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

/// Attach relative median MSE within each (signal, rsnr) group:
/// the group's minimum median divided by the row's own median.
pub fn fill_relative_medians(rows: &mut [SimulationRow]) {
    let keys: Vec<(String, u64)> = rows
        .iter()
        .map(|r| (r.signal.clone(), r.rsnr.to_bits()))
        .collect();
    for i in 0..rows.len() {
        let min = rows
            .iter()
            .zip(&keys)
            .filter(|(_, k)| **k == keys[i])
            .map(|(r, _)| r.median_mse)
            .fold(f64::INFINITY, f64::min);
        rows[i].relative_median_mse = min / rows[i].median_mse;
    }
}
