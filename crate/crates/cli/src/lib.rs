//! Library side of the `mapshrink` command-line tool: configuration parsing,
//! the experiment harness, and the subcommand implementations. The binary in
//! `main.rs` is a thin argument-parsing wrapper so that everything here stays
//! testable in-process.

pub mod commands;
pub mod config;
pub mod report;

use std::fmt;

/// Classified failures so the binary can honor the exit-code contract:
/// 0 success, 1 I/O failure, 2 validation failure.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
        }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }

    pub fn validation(e: impl fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mapshrink::Error> for CliError {
    fn from(e: mapshrink::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Stateless seed derivation for replication streams: replication `r` of
/// grid cell `(i, j)` always sees the same noise no matter how many other
/// cells or estimators are configured.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master ^ 0x9e37_79b9_7f4a_7c15);
    for &p in parts {
        state = splitmix64(state ^ p);
    }
    state
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Ordinary median of an unsorted sample.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
