//! `mapshrink rates`: convergence-rate experiments over a grid of sample
//! sizes, in either of two modes.
//!
//! Function mode runs a wavelet denoiser on a test signal across the grid and
//! fits the least-squares slope of `ln(median risk)` against `ln n`; the risk
//! is the plain MSE for `m = 0` and the `2^{2mj}`-weighted coefficient risk
//! for `m > 0`. Ball mode measures Monte Carlo risk at the worst-case mean of
//! an l_p-ball whose radius scales as `eta^p = c/n`, and reports it against
//! the zone's minimax rate.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use mapshrink::{
    add_noise, alpha_default, dwt_forward, filter_bank, least_favorable, make_signal,
    minimax_rate_in_zone, monte_carlo_risk, mse, weighted_level_risk, zone_classify, LpBallSpec,
    PriorSpec,
};

use crate::commands::simulate::run_estimator;
use crate::config::EstimatorKind;
use crate::report::{BallRateRow, FunctionRateRow, SCHEMA_VERSION};
use crate::{derive_seed, log_log_slope, median, CliError, CliResult};

#[derive(Debug, Clone)]
pub struct FunctionRatesArgs {
    pub signal: String,
    pub n_grid: Vec<usize>,
    pub m: f64,
    pub rsnr: f64,
    pub reps: usize,
    pub seed: u64,
    pub filter: String,
    pub j0: usize,
    pub estimators: Vec<EstimatorKind>,
}

#[derive(Debug, Clone)]
pub struct BallRatesArgs {
    pub p: f64,
    /// `eta^p = eta_scale / n` across the grid.
    pub eta_scale: f64,
    pub n_grid: Vec<usize>,
    pub alpha: Option<f64>,
    pub q: f64,
    pub gamma: f64,
    pub reps: usize,
    pub seed: u64,
}

fn validate_grid(n_grid: &[usize]) -> CliResult<()> {
    if n_grid.len() < 3 {
        return Err(CliError::Validation(format!(
            "n-grid needs at least 3 sizes to fit a slope, got {}",
            n_grid.len()
        )));
    }
    for &n in n_grid {
        if n < 2 || !n.is_power_of_two() {
            return Err(CliError::Validation(format!(
                "grid size {n} is not a power of two >= 2"
            )));
        }
    }
    Ok(())
}

/// Run function-mode rate measurement; one row per (estimator, n).
pub fn run_function(args: &FunctionRatesArgs) -> CliResult<Vec<FunctionRateRow>> {
    validate_grid(&args.n_grid)?;
    if args.m < 0.0 {
        return Err(CliError::Validation("m must be non-negative".into()));
    }
    if args.reps < 1 {
        return Err(CliError::Validation("reps must be >= 1".into()));
    }
    let filter = filter_bank::<f64>(&args.filter)?;

    let mut medians: Vec<Vec<f64>> = vec![Vec::new(); args.estimators.len()];
    for (n_idx, &n) in args.n_grid.iter().enumerate() {
        let clean = make_signal::<f64>(&args.signal, n)?;
        let clean_decomp = if args.m > 0.0 {
            Some(dwt_forward(&clean.samples, &filter, args.j0)?)
        } else {
            None
        };
        let risks: Vec<Vec<f64>> = (0..args.reps)
            .into_par_iter()
            .map(|rep| {
                let seed = derive_seed(args.seed, &[n_idx as u64, rep as u64]);
                let obs = add_noise(&clean, args.rsnr, seed).expect("validated rsnr");
                args.estimators
                    .iter()
                    .map(|&kind| {
                        let out = run_estimator(kind, &obs.y, &filter, args.j0)
                            .expect("validated dimensions");
                        match &clean_decomp {
                            None => mse(&out.f_hat, &clean.samples).expect("same length"),
                            Some(truth) => {
                                weighted_level_risk(&out.decomposition_hat, truth, args.m)
                                    .expect("same shape")
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        for e in 0..args.estimators.len() {
            let vals: Vec<f64> = risks.iter().map(|r| r[e]).collect();
            medians[e].push(median(&vals));
        }
    }

    let ns: Vec<f64> = args.n_grid.iter().map(|&n| n as f64).collect();
    let mut rows = Vec::new();
    for (e, &kind) in args.estimators.iter().enumerate() {
        let slope = log_log_slope(&ns, &medians[e]);
        for (i, &n) in args.n_grid.iter().enumerate() {
            rows.push(FunctionRateRow {
                schema_version: SCHEMA_VERSION,
                mode: "function".to_string(),
                signal: args.signal.clone(),
                estimator: kind.name().to_string(),
                m: args.m,
                rsnr: args.rsnr,
                n,
                median_risk: medians[e][i],
                slope,
            });
        }
    }
    Ok(rows)
}

/// Run ball-mode rate measurement; one row per grid size.
pub fn run_ball(args: &BallRatesArgs) -> CliResult<Vec<BallRateRow>> {
    validate_grid(&args.n_grid)?;
    if args.reps < 1 {
        return Err(CliError::Validation("reps must be >= 1".into()));
    }
    let alpha = args.alpha.unwrap_or_else(alpha_default::<f64>);
    if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(CliError::Validation(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }

    let mut rows = Vec::new();
    for (n_idx, &n) in args.n_grid.iter().enumerate() {
        let etap = args.eta_scale / n as f64;
        if etap.is_nan() || etap <= 0.0 {
            return Err(CliError::Validation(format!(
                "eta^p = {etap} must be positive (eta-scale {})",
                args.eta_scale
            )));
        }
        let eta = etap.powf(1.0 / args.p);
        let ball = LpBallSpec::new(args.p, eta, n, 1.0)?;
        let zone = zone_classify(&ball, alpha);
        let mu = least_favorable(&ball, zone)?;
        let prior = PriorSpec::trunc_geom(n, args.q, args.gamma)?;
        let seed = derive_seed(args.seed, &[n_idx as u64]);
        let risk = monte_carlo_risk(&mu, 1.0, &prior, args.reps, seed)?;
        let rate = minimax_rate_in_zone(&ball, zone);
        rows.push(BallRateRow {
            schema_version: SCHEMA_VERSION,
            mode: "ball".to_string(),
            p: args.p,
            eta_scale: args.eta_scale,
            alpha,
            n,
            zone: zone.to_string(),
            mc_risk: risk.mean_sq_error,
            minimax_rate: rate,
            ratio: risk.mean_sq_error / rate,
            slope: 0.0,
        });
    }

    let ns: Vec<f64> = args.n_grid.iter().map(|&n| n as f64).collect();
    let risks: Vec<f64> = rows.iter().map(|r| r.mc_risk).collect();
    let slope = log_log_slope(&ns, &risks);
    for row in &mut rows {
        row.slope = slope;
    }
    Ok(rows)
}

pub fn write_function(args: &FunctionRatesArgs, output: &Path) -> CliResult<()> {
    let rows = run_function(args)?;
    let file = fs::File::create(output)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", output.display())))?;
    crate::report::write_csv(&rows, file)
}

pub fn write_ball(args: &BallRatesArgs, output: &Path) -> CliResult<()> {
    let rows = run_ball(args)?;
    let file = fs::File::create(output)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", output.display())))?;
    crate::report::write_csv(&rows, file)
}
