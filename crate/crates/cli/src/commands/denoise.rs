//! `mapshrink denoise`: read a sampled signal from CSV, denoise it, write the
//! estimate plus a JSON sidecar of per-level diagnostics.
//!
//! Input: a single-column CSV of samples, or a two-column `t,y` CSV; an
//! optional non-numeric header line is skipped. The sample count must be a
//! power of two. Output: a `t,y_hat` CSV at the requested path and a sidecar
//! at the same path with the extension replaced by `.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use mapshrink::{denoise_global, denoise_levelwise, denoise_universal, filter_bank, DenoiseResult};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Levelwise,
    Global,
    Universal,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Levelwise => "levelwise",
            Mode::Global => "global",
            Mode::Universal => "universal",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "levelwise" => Ok(Mode::Levelwise),
            "global" => Ok(Mode::Global),
            "universal" => Ok(Mode::Universal),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    pub filter: String,
    pub j0: usize,
    pub sigma: Option<f64>,
    pub mode: Mode,
}

#[derive(Debug, Serialize)]
struct SidecarLevel {
    j: usize,
    n_j: usize,
    /// Non-zero coefficients left in this level after thresholding.
    kappa_kept: usize,
    /// Profile maximizer of the hyperparameter fit (absent for universal).
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_fit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_hat: Option<f64>,
    /// Hard threshold applied to this level; `null` when the whole level died.
    threshold: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Sidecar {
    schema_version: u32,
    filter: String,
    j0: usize,
    mode: String,
    n: usize,
    sigma_supplied: Option<f64>,
    sigma_hat: f64,
    surviving_fraction: f64,
    degenerate_noise: bool,
    levels: Vec<SidecarLevel>,
    warnings: Vec<String>,
}

fn parse_samples(text: &str, path: &Path) -> CliResult<Vec<f64>> {
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let value_field = match fields.len() {
            1 => fields[0],
            2 => fields[1],
            k => {
                return Err(CliError::Validation(format!(
                    "{}:{}: expected 1 or 2 columns, found {k}",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        match value_field.parse::<f64>() {
            Ok(v) if v.is_finite() => samples.push(v),
            Ok(v) => {
                return Err(CliError::Validation(format!(
                    "{}:{}: non-finite sample {v}",
                    path.display(),
                    lineno + 1
                )))
            }
            Err(_) if lineno == 0 => continue, // header line
            Err(e) => {
                return Err(CliError::Validation(format!(
                    "{}:{}: {e}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    if samples.len() < 2 || !samples.len().is_power_of_two() {
        return Err(CliError::Validation(format!(
            "{}: sample count {} is not a power of two >= 2",
            path.display(),
            samples.len()
        )));
    }
    Ok(samples)
}

fn build_sidecar(args: &DenoiseArgs, result: &DenoiseResult<f64>) -> Sidecar {
    let decomp = &result.decomposition_hat;
    let mut levels = Vec::new();
    let mut warnings = Vec::new();
    let degenerate = result.sigma_hat == 0.0;
    if degenerate {
        warnings.push(
            "degenerate noise level (estimated sigma = 0); input returned unchanged".to_string(),
        );
    }
    for (idx, j) in decomp.detail_levels().enumerate() {
        let kept = decomp.detail(j).iter().filter(|&&v| v != 0.0).count();
        let fit = result.level_fits.get(idx);
        let threshold = result
            .thresholds
            .get(idx)
            .copied()
            .filter(|&t| t.is_finite());
        levels.push(SidecarLevel {
            j,
            n_j: decomp.detail(j).len(),
            kappa_kept: kept,
            kappa_fit: fit.map(|f| f.kappa_hat),
            q_hat: fit.map(|f| f.q_hat),
            gamma_hat: fit.map(|f| f.gamma_hat),
            threshold,
        });
    }
    Sidecar {
        schema_version: crate::report::SCHEMA_VERSION,
        filter: args.filter.clone(),
        j0: args.j0,
        mode: args.mode.name().to_string(),
        n: result.f_hat.len(),
        sigma_supplied: args.sigma,
        sigma_hat: result.sigma_hat,
        surviving_fraction: result.surviving_fraction,
        degenerate_noise: degenerate,
        levels,
        warnings,
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

pub fn run(args: &DenoiseArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.input.display())))?;
    let samples = parse_samples(&text, &args.input)?;

    let filter = filter_bank::<f64>(&args.filter)?;
    if let Some(s) = args.sigma {
        if s.is_nan() || s < 0.0 || !s.is_finite() {
            return Err(CliError::Validation(format!(
                "sigma must be non-negative and finite, got {s}"
            )));
        }
    }
    let result = match args.mode {
        Mode::Levelwise => denoise_levelwise(&samples, &filter, args.j0, args.sigma)?,
        Mode::Global => denoise_global(&samples, &filter, args.j0, args.sigma)?,
        Mode::Universal => denoise_universal(&samples, &filter, args.j0, args.sigma)?,
    };

    let sidecar = build_sidecar(args, &result);
    for w in &sidecar.warnings {
        eprintln!("warning: {w}");
    }

    let n = result.f_hat.len();
    let mut csv_out = String::from("t,y_hat\n");
    for (i, v) in result.f_hat.iter().enumerate() {
        csv_out.push_str(&format!("{},{}\n", (i + 1) as f64 / n as f64, v));
    }
    fs::write(&args.output, csv_out)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", args.output.display())))?;

    let json = serde_json::to_string_pretty(&sidecar).map_err(CliError::io)?;
    let sidecar_file = sidecar_path(&args.output);
    fs::write(&sidecar_file, json + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", sidecar_file.display())))?;
    Ok(())
}
