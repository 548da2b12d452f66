//! Standard benchmark signals, seeded Gaussian noise calibrated by the root
//! signal-to-noise ratio, and goodness-of-fit metrics.
//!
//! Signals are sampled on the grid `t_i = i/n, i = 1..n`. The noise level for
//! a requested RSNR is the population standard deviation of the sampled
//! signal divided by the RSNR.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// A named test signal sampled on the uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSignal<T> {
    pub name: String,
    pub samples: Vec<T>,
}

/// Names accepted by [`make_signal`].
pub const SIGNAL_NAMES: [&str; 6] = ["wave", "peak", "bumps", "blocks", "doppler", "heavisine"];

const BLOCKS_T: [f64; 11] = [
    0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81,
];
const BLOCKS_H: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMPS_H: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMPS_W: [f64; 11] = [
    0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005,
];

fn signal_value(name: &str, t: f64) -> f64 {
    use std::f64::consts::PI;
    match name {
        "wave" => 0.5 + 0.2 * (4.0 * PI * t).cos() + 0.1 * (24.0 * PI * t).cos(),
        "peak" => (-(t - 0.5).abs()).exp(),
        "blocks" => BLOCKS_T
            .iter()
            .zip(&BLOCKS_H)
            .map(|(&tj, &hj)| hj * (1.0 + (t - tj).signum()) / 2.0)
            .sum(),
        "bumps" => BLOCKS_T
            .iter()
            .zip(BUMPS_H.iter().zip(&BUMPS_W))
            .map(|(&tj, (&hj, &wj))| hj * (1.0 + ((t - tj) / wj).abs()).powi(-4))
            .sum(),
        "doppler" => (t * (1.0 - t)).sqrt() * (2.0 * PI * 1.05 / (t + 0.05)).sin(),
        "heavisine" => 4.0 * (4.0 * PI * t).sin() - (t - 0.3).signum() - (0.72 - t).signum(),
        _ => unreachable!("caller validates the name"),
    }
}

/// Sample one of the six standard signals at `n` grid points.
pub fn make_signal<T: Real>(name: &str, n: usize) -> Result<TestSignal<T>> {
    if !SIGNAL_NAMES.contains(&name) {
        return Err(Error::UnsupportedSignal(name.to_string()));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "sample count must be a power of two >= 2, got {n}"
        )));
    }
    let samples = (1..=n)
        .map(|i| real::<T>(signal_value(name, i as f64 / n as f64)))
        .collect();
    Ok(TestSignal {
        name: name.to_string(),
        samples,
    })
}

/// Population (divide-by-n) standard deviation.
pub fn population_sd<T: Real>(samples: &[T]) -> T {
    let nf = real::<T>(samples.len() as f64);
    let mean = samples.iter().cloned().sum::<T>() / nf;
    let var = samples.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / nf;
    var.sqrt()
}

/// A signal with seeded additive Gaussian noise at a given RSNR.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyObservation<T> {
    pub clean: TestSignal<T>,
    pub y: Vec<T>,
    pub sigma: T,
    pub rsnr: T,
    pub seed: u64,
}

/// Add seeded iid `N(0, sigma^2)` noise with `sigma = sd(signal) / rsnr`.
pub fn add_noise<T: Real>(
    signal: &TestSignal<T>,
    rsnr: T,
    seed: u64,
) -> Result<NoisyObservation<T>> {
    if rsnr.is_nan() || rsnr <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "rsnr must be positive, got {rsnr}"
        )));
    }
    let sigma = population_sd(&signal.samples) / rsnr;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = signal
        .samples
        .iter()
        .map(|&f| {
            let z: f64 = StandardNormal.sample(&mut rng);
            f + sigma * real::<T>(z)
        })
        .collect();
    Ok(NoisyObservation {
        clean: signal.clone(),
        y,
        sigma,
        rsnr,
        seed,
    })
}

/// Mean squared error `(1/n) sum (a_i - b_i)^2`.
pub fn mse<T: Real>(f_hat: &[T], f: &[T]) -> Result<T> {
    if f_hat.len() != f.len() {
        return Err(Error::DimensionMismatch(format!(
            "lengths {} vs {}",
            f_hat.len(),
            f.len()
        )));
    }
    let nf = real::<T>(f.len() as f64);
    Ok(f_hat
        .iter()
        .zip(f)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<T>()
        / nf)
}

/// Render a signal as two-column CSV (`t,f`), the export format for plots.
pub fn signal_to_csv<T: Real>(signal: &TestSignal<T>) -> String {
    let n = signal.samples.len();
    let mut out = String::from("t,f\n");
    for (i, v) in signal.samples.iter().enumerate() {
        out.push_str(&format!("{},{}\n", (i + 1) as f64 / n as f64, v));
    }
    out
}
