//! Strong l_p-ball geometry: risk-zone classification, order-of-magnitude
//! minimax rates, worst-case mean configurations, and Monte Carlo risk
//! measurement for the MAP sequence estimator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map::{select_kappa, NoisySequence, PriorSpec};
use crate::scalar::{real, Real};

/// A strong l_p-ball `{mu : ||mu||_p <= C_n}` with normalized radius `eta`,
/// so `C_n = n^{1/p} sigma eta` (and `C_n = sigma eta` for `p = inf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBallSpec<T> {
    p: T,
    eta: T,
    n: usize,
    sigma: T,
}

/// Risk zones: the four qualitatively different regimes of `(p, eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    /// `eta^p > alpha`: radius so large the trivial `n sigma^2` rate is sharp.
    Dense1,
    /// `p >= 2`, `eta^p <= alpha`: dense regime, rate `sigma^2 n eta^2`.
    Dense2,
    /// `p < 2`, moderate radius: sparse regime with a logarithmic factor.
    Sparse3,
    /// `p < 2`, radius below the sparse cutoff: at most a handful of spikes.
    SuperSparse4,
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            Zone::Dense1 => "dense-1",
            Zone::Dense2 => "dense-2",
            Zone::Sparse3 => "sparse-3",
            Zone::SuperSparse4 => "supersparse-4",
        };
        f.write_str(tag)
    }
}

/// Default zone-boundary constant `alpha = exp(-9/2)` for unknown variance ratio.
pub fn alpha_default<T: Real>() -> T {
    real::<T>((-4.5f64).exp())
}

/// `alpha = exp(-c(gamma))` with `c(gamma) = 8 (gamma + 3/4)^2`, for a known
/// lower bound on the variance ratio.
pub fn alpha_for_gamma<T: Real>(gamma_minus: T) -> T {
    let c = real::<T>(8.0) * (gamma_minus + real::<T>(0.75)).powi(2);
    (-c).exp()
}

impl<T: Real> LpBallSpec<T> {
    /// `p` may be `T::infinity()` for the sup-norm ball.
    pub fn new(p: T, eta: T, n: usize, sigma: T) -> Result<Self> {
        if p.is_nan() || p <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "p must be positive, got {p}"
            )));
        }
        if eta.is_nan() || eta <= T::zero() || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "normalized radius eta must be positive and finite, got {eta}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
        }
        if sigma.is_nan() || sigma <= T::zero() || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise scale sigma must be positive and finite, got {sigma}"
            )));
        }
        let ball = Self { p, eta, n, sigma };
        if !ball.radius().is_finite() || ball.radius() <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "induced radius C_n = {} is not positive finite",
                ball.radius()
            )));
        }
        Ok(ball)
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Induced radius `C_n = n^{1/p} sigma eta` (`sigma eta` when `p = inf`).
    pub fn radius(&self) -> T {
        let exponent = if self.p.is_infinite() {
            T::zero()
        } else {
            T::one() / self.p
        };
        real::<T>(self.n as f64).powf(exponent) * self.sigma * self.eta
    }

    /// `eta^p`, with the IEEE conventions at `p = inf` (0 below 1, 1 at 1).
    pub fn eta_pow_p(&self) -> T {
        self.eta.powf(self.p)
    }

    /// `||mu||_p <= C_n` up to a small relative slack for rounding.
    pub fn contains(&self, mu: &[T]) -> bool {
        let norm = self.lp_norm(mu);
        norm <= self.radius() * (T::one() + T::tolerance(1e-12))
    }

    fn lp_norm(&self, mu: &[T]) -> T {
        if self.p.is_infinite() {
            mu.iter().map(|v| v.abs()).fold(T::zero(), T::max)
        } else {
            mu.iter()
                .map(|v| v.abs().powf(self.p))
                .sum::<T>()
                .powf(T::one() / self.p)
        }
    }

    /// Sparse-zone cutoff `n^{-1} (2 ln n)^{p/2}` separating Cases 3 and 4.
    pub fn sparse_cutoff(&self) -> T {
        let nf = real::<T>(self.n as f64);
        (real::<T>(2.0) * nf.ln()).powf(self.p / real::<T>(2.0)) / nf
    }
}

/// Classify a ball into its risk zone for a given boundary constant `alpha`.
pub fn zone_classify<T: Real>(ball: &LpBallSpec<T>, alpha: T) -> Zone {
    debug_assert!(alpha > T::zero() && alpha < T::one());
    let etap = ball.eta_pow_p();
    if etap > alpha {
        Zone::Dense1
    } else if ball.p() >= real::<T>(2.0) {
        Zone::Dense2
    } else if etap >= ball.sparse_cutoff() {
        Zone::Sparse3
    } else {
        Zone::SuperSparse4
    }
}

/// Order-of-magnitude minimax rate for the classified zone (no sharp constants).
pub fn minimax_rate<T: Real>(ball: &LpBallSpec<T>, alpha: T) -> T {
    minimax_rate_in_zone(ball, zone_classify(ball, alpha))
}

/// Rate formula for an explicitly chosen zone.
pub fn minimax_rate_in_zone<T: Real>(ball: &LpBallSpec<T>, zone: Zone) -> T {
    let nf = real::<T>(ball.n() as f64);
    let s2 = ball.sigma() * ball.sigma();
    let eta = ball.eta();
    match zone {
        Zone::Dense1 => nf * s2,
        Zone::Dense2 => s2 * nf * eta * eta,
        Zone::Sparse3 => {
            let etap = ball.eta_pow_p();
            let logs = real::<T>(2.0) * (T::one() / etap).ln();
            s2 * nf * etap * logs.powf(T::one() - ball.p() / real::<T>(2.0))
        }
        Zone::SuperSparse4 => s2 * nf.powf(real::<T>(2.0) / ball.p()) * eta * eta,
    }
}

/// Worst-case mean configuration for the given zone.
///
/// Dense-2: the constant vector at `eta sigma`, which sits on the boundary
/// of the ball. Super-sparse: a single spike of height `C_n`. Sparse:
/// `floor(n eta^p / (2 ln eta^{-p})^{p/2})` spikes at
/// the near-threshold magnitude `sigma sqrt(2 ln eta^{-p})`, the standard
/// near-worst configuration that stays inside the ball.
pub fn least_favorable<T: Real>(ball: &LpBallSpec<T>, zone: Zone) -> Result<Vec<T>> {
    let n = ball.n();
    let mu = match zone {
        Zone::Dense1 => {
            return Err(Error::InvalidParameter(
                "no explicit worst-case configuration for dense-1; \
                 use the dense-2 construction with a large radius"
                    .into(),
            ))
        }
        Zone::Dense2 => vec![ball.eta() * ball.sigma(); n],
        Zone::SuperSparse4 => {
            let mut mu = vec![T::zero(); n];
            mu[0] = ball.radius();
            mu
        }
        Zone::Sparse3 => {
            let etap = ball.eta_pow_p();
            if etap.is_nan() || etap >= T::one() {
                return Err(Error::InvalidParameter(format!(
                    "sparse construction needs eta^p < 1, got {etap}"
                )));
            }
            let logs = real::<T>(2.0) * (T::one() / etap).ln();
            let magnitude = ball.sigma() * logs.sqrt();
            let count_f = real::<T>(n as f64) * etap / logs.powf(ball.p() / real::<T>(2.0));
            let count = (count_f.to_f64().unwrap().floor() as usize).clamp(1, n);
            let mut mu = vec![T::zero(); n];
            for slot in mu.iter_mut().take(count) {
                *slot = magnitude;
            }
            mu
        }
    };
    debug_assert!(ball.contains(&mu));
    Ok(mu)
}

/// Monte Carlo estimate of `E ||mu_hat - mu||^2` with the given prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate<T> {
    /// Average squared error over all replications.
    pub mean_sq_error: T,
    /// Standard error of that average.
    pub std_error: T,
    pub replications: usize,
    pub seed: u64,
}

/// Average `||mu_hat - mu||^2` over `reps` independent noise draws.
///
/// Replication `r` draws its noise from a stream derived from `(seed, r)`,
/// so the result does not depend on execution order and is reproducible.
pub fn monte_carlo_risk<T: Real>(
    mu: &[T],
    sigma: T,
    prior: &PriorSpec<T>,
    reps: usize,
    seed: u64,
) -> Result<RiskEstimate<T>> {
    if reps < 1 {
        return Err(Error::InvalidParameter(
            "need at least one replication".into(),
        ));
    }
    if mu.len() != prior.n() {
        return Err(Error::DimensionMismatch(format!(
            "mean length {} vs prior dimension {}",
            mu.len(),
            prior.n()
        )));
    }
    let losses: Vec<T> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let y: Vec<T> = mu
                .iter()
                .map(|&m| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    m + sigma * real::<T>(z)
                })
                .collect();
            let seq = NoisySequence::new(y, sigma).expect("finite draws");
            let est = select_kappa(&seq, prior).expect("dimensions match");
            est.mu_hat
                .iter()
                .zip(mu)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
        })
        .collect();

    let repsf = real::<T>(reps as f64);
    let mean = losses.iter().cloned().sum::<T>() / repsf;
    let std_error = if reps > 1 {
        let var = losses.iter().map(|&l| (l - mean) * (l - mean)).sum::<T>()
            / real::<T>((reps - 1) as f64);
        (var / repsf).sqrt()
    } else {
        T::zero()
    };
    Ok(RiskEstimate {
        mean_sq_error: mean,
        std_error,
        replications: reps,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zone_examples() {
        let alpha = alpha_default::<f64>();
        // p = 2, eta^p = 0.5 > alpha
        let ball = LpBallSpec::new(2.0, 0.5f64.sqrt(), 1024, 1.0).unwrap();
        assert_eq!(zone_classify(&ball, alpha), Zone::Dense1);

        // p = 1, n = 1024, eta = 10/1024: between cutoff and alpha
        let ball = LpBallSpec::new(1.0, 10.0 / 1024.0, 1024, 1.0).unwrap();
        assert_eq!(zone_classify(&ball, alpha), Zone::Sparse3);

        // p = 1, eta = 1/1024: below the cutoff
        let ball = LpBallSpec::new(1.0, 1.0 / 1024.0, 1024, 1.0).unwrap();
        assert_eq!(zone_classify(&ball, alpha), Zone::SuperSparse4);

        // p >= 2 with small radius
        let ball = LpBallSpec::new(2.0, 0.05, 1024, 1.0).unwrap();
        assert_eq!(zone_classify(&ball, alpha), Zone::Dense2);
    }

    #[test]
    fn zone_partition_is_total() {
        let alpha = alpha_default::<f64>();
        for &p in &[0.5f64, 1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            for &eta in &[1e-6f64, 1e-3, 0.01, 0.1, 0.5, 0.9, 2.0] {
                let ball = LpBallSpec::new(p, eta, 512, 1.0).unwrap();
                let _ = zone_classify(&ball, alpha); // must not panic; exactly one arm
            }
        }
    }

    #[test]
    fn rate_examples() {
        // dense-1: n sigma^2
        let ball = LpBallSpec::new(2.0, 0.9, 1024, 1.0).unwrap();
        assert_eq!(minimax_rate_in_zone(&ball, Zone::Dense1), 1024.0);

        // dense-2: sigma^2 n eta^2
        let ball = LpBallSpec::<f64>::new(2.0, 0.05, 1024, 1.0).unwrap();
        let r = minimax_rate_in_zone(&ball, Zone::Dense2);
        assert!((r - 2.56).abs() < 1e-12);

        // sparse-3: p = 1, eta^p = 64/1024 -> 64 * (2 ln 16)^{1/2}
        let ball = LpBallSpec::new(1.0, 64.0 / 1024.0, 1024, 1.0).unwrap();
        let r = minimax_rate_in_zone(&ball, Zone::Sparse3);
        let want = 64.0 * (2.0 * 16f64.ln()).sqrt();
        assert!((r - want).abs() < 1e-9);
        assert!((r - 150.7).abs() < 0.1);
    }

    #[test]
    fn alpha_constants() {
        assert!((alpha_default::<f64>() - (-4.5f64).exp()).abs() < 1e-15);
        // c(gamma) = 8 (gamma + 3/4)^2 > 9/2 for all gamma > 0
        for g in [0.1f64, 0.5, 1.0, 5.0] {
            assert!(alpha_for_gamma(g) < alpha_default::<f64>() + 1e-12);
        }
    }

    #[test]
    fn least_favorable_dense_case() {
        let ball = LpBallSpec::new(2.0, 0.5, 4, 1.0).unwrap();
        let mu = least_favorable(&ball, Zone::Dense2).unwrap();
        assert_eq!(mu, vec![0.5; 4]);
        assert!(ball.contains(&mu));
    }

    #[test]
    fn least_favorable_spike_case() {
        let ball = LpBallSpec::<f64>::new(1.0, 0.1, 4, 1.0).unwrap();
        let mu = least_favorable(&ball, Zone::SuperSparse4).unwrap();
        assert!((mu[0] - 0.4).abs() < 1e-12);
        assert!(mu[1..].iter().all(|&v| v == 0.0));
        assert!(ball.contains(&mu));
    }

    #[test]
    fn least_favorable_sparse_stays_in_ball() {
        for n in [256usize, 1024, 4096] {
            let ball = LpBallSpec::new(1.0, 64.0 / n as f64, n, 1.0).unwrap();
            let mu = least_favorable(&ball, Zone::Sparse3).unwrap();
            assert!(ball.contains(&mu), "n = {n}");
            assert!(mu.iter().any(|&v| v != 0.0));
        }
    }

    #[test]
    fn dense1_has_no_construction() {
        let ball = LpBallSpec::new(2.0, 0.9, 8, 1.0).unwrap();
        assert!(least_favorable(&ball, Zone::Dense1).is_err());
    }

    #[test]
    fn sup_norm_ball_radius() {
        let ball = LpBallSpec::new(f64::INFINITY, 0.5, 16, 2.0).unwrap();
        assert_eq!(ball.radius(), 1.0);
        assert!(ball.contains(&[1.0, -1.0, 0.3]));
        assert!(!ball.contains(&[1.2]));
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let prior = PriorSpec::trunc_geom(64, 0.5, 3.0).unwrap();
        let mu = vec![2.0f64; 64];
        let a = monte_carlo_risk(&mu, 1.0, &prior, 16, 7).unwrap();
        let b = monte_carlo_risk(&mu, 1.0, &prior, 16, 7).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_risk(&mu, 1.0, &prior, 16, 8).unwrap();
        assert_ne!(a.mean_sq_error, c.mean_sq_error);
    }

    #[test]
    fn zero_mean_risk_is_far_below_trivial() {
        let n = 256;
        let prior = PriorSpec::trunc_geom(n, 0.5, 3.0).unwrap();
        let mu = vec![0.0f64; n];
        let risk = monte_carlo_risk(&mu, 1.0, &prior, 50, 11).unwrap();
        assert!(
            risk.mean_sq_error < 0.2 * n as f64,
            "{}",
            risk.mean_sq_error
        );
    }
}
