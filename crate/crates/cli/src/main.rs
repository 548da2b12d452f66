//! Command-line front end. Exit codes: 0 success, 1 I/O failure,
//! 2 validation failure (clap usage errors also exit 2).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mapshrink_cli::commands::{check, denoise, rates, simulate};
use mapshrink_cli::config::EstimatorKind;
use mapshrink_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "mapshrink",
    about = "MAP wavelet denoising, simulation protocol, and rate experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Denoise a sampled signal from a CSV file
    Denoise(DenoiseArgs),
    /// Run the simulation protocol described by a config file
    Simulate(SimulateArgs),
    /// Measure convergence rates over a grid of sample sizes
    Rates(RatesArgs),
    /// Run the built-in bound and prior-condition checks
    Check(CheckArgs),
}

#[derive(Args)]
struct DenoiseArgs {
    /// Input CSV: one sample column, or t,y columns (power-of-two length)
    #[arg(long)]
    input: PathBuf,
    /// Output CSV path; the JSON sidecar lands next to it as <output>.json
    #[arg(long)]
    output: PathBuf,
    /// Wavelet filter name
    #[arg(long, default_value = "coif3")]
    filter: String,
    /// Primary resolution level
    #[arg(long, default_value_t = 4)]
    j0: usize,
    /// Known noise standard deviation; estimated from the data when absent
    #[arg(long)]
    sigma: Option<f64>,
    /// levelwise, global, or universal
    #[arg(long, default_value = "levelwise")]
    mode: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat key-value config file (see README for the grammar)
    #[arg(long)]
    config: PathBuf,
    /// Report CSV path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct RatesArgs {
    /// Test-signal name (function mode)
    #[arg(long, conflicts_with = "ball_p")]
    signal: Option<String>,
    /// l_p-ball exponent p (ball mode)
    #[arg(long, requires = "ball_eta_scale")]
    ball_p: Option<f64>,
    /// Ball radius scaling c, meaning eta^p = c/n across the grid
    #[arg(long)]
    ball_eta_scale: Option<f64>,
    /// Comma-separated powers of two, at least three
    #[arg(long, value_delimiter = ',', required = true)]
    n_grid: Vec<usize>,
    /// Derivative order for the weighted coefficient risk (function mode)
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    /// Root signal-to-noise ratio (function mode)
    #[arg(long, default_value_t = 5.0)]
    rsnr: f64,
    /// Replications per grid size
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Wavelet filter (function mode)
    #[arg(long, default_value = "coif3")]
    filter: String,
    /// Primary resolution level (function mode)
    #[arg(long, default_value_t = 4)]
    j0: usize,
    /// Estimators to run (function mode): map-levelwise, map-global, universal-hard
    #[arg(long, value_delimiter = ',', default_value = "map-levelwise")]
    estimators: Vec<String>,
    /// Zone boundary constant alpha (ball mode; default exp(-9/2))
    #[arg(long)]
    alpha: Option<f64>,
    /// Geometric prior parameter (ball mode)
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Prior variance ratio (ball mode)
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    /// Report CSV path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Largest n for the binomial-coefficient bounds sweep
    #[arg(long, default_value_t = 2000)]
    max_n: usize,
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("MAPSHRINK_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Denoise(a) => {
            let mode = a
                .mode
                .parse::<denoise::Mode>()
                .map_err(CliError::Validation)?;
            denoise::run(&denoise::DenoiseArgs {
                input: a.input,
                output: a.output,
                filter: a.filter,
                j0: a.j0,
                sigma: a.sigma,
                mode,
            })
        }
        Command::Simulate(a) => simulate::run(&a.config, &a.output),
        Command::Rates(a) => match (&a.signal, a.ball_p) {
            (Some(signal), None) => {
                let estimators = a
                    .estimators
                    .iter()
                    .map(|s| s.parse::<EstimatorKind>().map_err(CliError::Validation))
                    .collect::<CliResult<Vec<_>>>()?;
                rates::write_function(
                    &rates::FunctionRatesArgs {
                        signal: signal.clone(),
                        n_grid: a.n_grid,
                        m: a.m,
                        rsnr: a.rsnr,
                        reps: a.reps,
                        seed: a.seed,
                        filter: a.filter,
                        j0: a.j0,
                        estimators,
                    },
                    &a.output,
                )
            }
            (None, Some(p)) => rates::write_ball(
                &rates::BallRatesArgs {
                    p,
                    eta_scale: a.ball_eta_scale.expect("clap enforces the pair"),
                    n_grid: a.n_grid,
                    alpha: a.alpha,
                    q: a.q,
                    gamma: a.gamma,
                    reps: a.reps,
                    seed: a.seed,
                },
                &a.output,
            ),
            _ => Err(CliError::Validation(
                "pass exactly one of --signal (function mode) or --ball-p (ball mode)".into(),
            )),
        },
        Command::Check(a) => check::run(&check::CheckArgs { max_n: a.max_n }),
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
