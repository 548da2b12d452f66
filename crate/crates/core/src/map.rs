//! MAP model selection for the sparse Gaussian sequence model.
//!
//! Observations follow `y_i = mu_i + sigma * z_i` with iid standard Gaussian
//! noise. A prior on the number `kappa` of non-zero means, together with a
//! Gaussian slab of variance `gamma * sigma^2` on the non-zero entries, turns
//! posterior maximization into a one-dimensional search over `kappa`: the most
//! plausible support of size `kappa` is always the `kappa` largest `|y_i|`, so
//! the posterior mode is found by minimizing a residual-plus-penalty objective
//! over `kappa = 0..=n`. The resulting estimator is hard thresholding at the
//! `kappa`-th largest magnitude.

use crate::error::{Error, Result};
use crate::scalar::{ln_binomial, real, Real};

/// Prior specification: a distribution over the non-zero count plus the
/// slab-to-noise variance ratio.
///
/// Probabilities are held in log form so that strictly positive priors remain
/// representable even when the linear values underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec<T> {
    n: usize,
    log_pi: Vec<T>,
    gamma: T,
}

impl<T: Real> PriorSpec<T> {
    /// Build a prior from unnormalized log-weights over `kappa = 0..=n`.
    ///
    /// Weights are normalized in log domain. Every weight must be finite:
    /// the model requires `pi(kappa) > 0` for all counts.
    pub fn from_log_weights(log_weights: Vec<T>, gamma: T) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::InvalidInput(
                "prior needs at least one weight".into(),
            ));
        }
        if gamma.is_nan() || gamma <= T::zero() || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "variance ratio gamma must be positive and finite, got {gamma}"
            )));
        }
        if log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(
                "prior log-weights must be finite (pi(kappa) > 0 for all kappa)".into(),
            ));
        }
        let max = log_weights.iter().cloned().fold(T::neg_infinity(), T::max);
        let log_norm = log_weights.iter().map(|&w| (w - max).exp()).sum::<T>().ln() + max;
        let log_pi: Vec<T> = log_weights.into_iter().map(|w| w - log_norm).collect();
        Ok(Self {
            n: log_pi.len() - 1,
            log_pi,
            gamma,
        })
    }

    /// Truncated geometric prior `TrGeom(1 - q)`:
    /// `pi(kappa) = (1 - q) q^kappa / (1 - q^{n+1})` for `kappa = 0..=n`.
    pub fn trunc_geom(n: usize, q: T, gamma: T) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension n must be >= 1".into()));
        }
        if q.is_nan() || q <= T::zero() || q >= T::one() {
            return Err(Error::InvalidParameter(format!(
                "geometric parameter q must lie in (0, 1), got {q}"
            )));
        }
        if gamma.is_nan() || gamma <= T::zero() || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "variance ratio gamma must be positive and finite, got {gamma}"
            )));
        }
        let log_q = q.ln();
        // ln(1 - q^{n+1}) via ln_1p for accuracy when q^{n+1} underflows.
        let tail = real::<T>((n + 1) as f64) * log_q;
        let log_norm_tail = (-tail.exp()).ln_1p();
        let base = (T::one() - q).ln() - log_norm_tail;
        let log_pi = (0..=n)
            .map(|k| base + real::<T>(k as f64) * log_q)
            .collect();
        Ok(Self { n, log_pi, gamma })
    }

    /// Uniform prior over `kappa = 0..=n`.
    pub fn uniform(n: usize, gamma: T) -> Result<Self> {
        Self::from_log_weights(vec![T::zero(); n + 1], gamma)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `ln pi(kappa)`.
    pub fn log_pi(&self, kappa: usize) -> T {
        self.log_pi[kappa]
    }

    pub fn log_pi_slice(&self) -> &[T] {
        &self.log_pi
    }

    /// Check the type invariants: finite log-probabilities, positive gamma,
    /// normalization within tolerance.
    pub fn validate(&self) -> Result<()> {
        if self.log_pi.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(
                "prior has a non-finite log-probability".into(),
            ));
        }
        if self.gamma.is_nan() || self.gamma <= T::zero() {
            return Err(Error::InvalidParameter("gamma must be positive".into()));
        }
        let total: T = self.log_pi.iter().map(|&w| w.exp()).sum();
        if (total - T::one()).abs() > T::tolerance(1e-10) {
            return Err(Error::InvalidInput(format!(
                "prior probabilities sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Observed sequence `y` with known noise standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisySequence<T> {
    y: Vec<T>,
    sigma: T,
}

impl<T: Real> NoisySequence<T> {
    pub fn new(y: Vec<T>, sigma: T) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidInput(
                "observation vector must be non-empty".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("observations must be finite".into()));
        }
        if sigma.is_nan() || sigma <= T::zero() || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise level sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { y, sigma })
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Output of [`select_kappa`]: selected model size, the matching hard
/// threshold, the estimated mean vector, and the full objective profile.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEstimate<T> {
    /// Number of observations kept.
    pub kappa_hat: usize,
    /// `|y|_(kappa_hat)`, the smallest kept magnitude; `+inf` when nothing is kept.
    pub threshold: T,
    /// Hard-thresholded mean estimate: each entry is exactly `0` or `y_i`.
    pub mu_hat: Vec<T>,
    /// `objective[kappa]` = residual sum of squares past `kappa` plus penalty, for
    /// `kappa = 0..=n`. Kept for diagnostics and oracle tests.
    pub objective: Vec<T>,
}

/// Bayes factor of the point-null `mu_i = 0` for a single observation:
/// `sqrt(1 + gamma) * exp(-y^2 / (2 sigma^2 (1 + 1/gamma)))`.
///
/// Strictly decreasing in `|y|`; small values favor keeping the coefficient.
pub fn bayes_factor<T: Real>(y: T, sigma: T, gamma: T) -> T {
    debug_assert!(sigma > T::zero() && gamma > T::zero());
    let two = real::<T>(2.0);
    let scale = two * sigma * sigma * (T::one() + T::one() / gamma);
    (T::one() + gamma).sqrt() * (-(y * y) / scale).exp()
}

/// `ln` of the Bayes factor; used to keep the posterior score stable for large `|y|`.
fn ln_bayes_factor<T: Real>(y: T, sigma: T, gamma: T) -> T {
    let two = real::<T>(2.0);
    let scale = two * sigma * sigma * (T::one() + T::one() / gamma);
    (T::one() + gamma).ln() / two - (y * y) / scale
}

/// Complexity penalty of the equivalent penalized least-squares form:
///
/// `P(kappa) = 2 sigma^2 (1 + 1/gamma) [ln C(n, kappa) - ln pi(kappa) + (kappa/2) ln(1 + gamma)]`.
pub fn complexity_penalty<T: Real>(kappa: usize, prior: &PriorSpec<T>, sigma: T) -> Result<T> {
    if kappa > prior.n() {
        return Err(Error::IndexOutOfRange(format!(
            "kappa = {kappa} exceeds prior dimension n = {}",
            prior.n()
        )));
    }
    Ok(penalty_unchecked(kappa, prior, sigma))
}

fn penalty_unchecked<T: Real>(kappa: usize, prior: &PriorSpec<T>, sigma: T) -> T {
    let two = real::<T>(2.0);
    let half = real::<T>(0.5);
    let gamma = prior.gamma();
    let lead = two * sigma * sigma * (T::one() + T::one() / gamma);
    let bracket = ln_binomial::<T>(prior.n(), kappa) - prior.log_pi(kappa)
        + half * real::<T>(kappa as f64) * (T::one() + gamma).ln();
    lead * bracket
}

/// Select the posterior-mode model size and hard-threshold the observations.
///
/// Sorts `|y|` in decreasing order (stable, so exact ties keep their original
/// index order), forms suffix sums of squares, and minimizes
/// `objective[kappa] = sum_{i > kappa} y_(i)^2 + P(kappa)` over `kappa = 0..=n`,
/// preferring the smallest `kappa` among exact ties. `O(n log n)`.
pub fn select_kappa<T: Real>(
    seq: &NoisySequence<T>,
    prior: &PriorSpec<T>,
) -> Result<MapEstimate<T>> {
    let n = seq.len();
    if n != prior.n() {
        return Err(Error::DimensionMismatch(format!(
            "sequence length {n} vs prior dimension {}",
            prior.n()
        )));
    }
    let y = seq.y();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        y[b].abs()
            .partial_cmp(&y[a].abs())
            .expect("finite observations compare")
    });

    // suffix[kappa] = sum of squares of all but the kappa largest magnitudes
    let mut suffix = vec![T::zero(); n + 1];
    for i in (0..n).rev() {
        let v = y[order[i]];
        suffix[i] = suffix[i + 1] + v * v;
    }

    let mut objective = Vec::with_capacity(n + 1);
    let mut best = 0usize;
    for (kappa, &tail) in suffix.iter().enumerate() {
        let obj = tail + penalty_unchecked(kappa, prior, seq.sigma());
        objective.push(obj);
        if obj < objective[best] {
            best = kappa;
        }
    }

    let mut mu_hat = vec![T::zero(); n];
    for &idx in &order[..best] {
        mu_hat[idx] = y[idx];
    }
    let threshold = if best == 0 {
        T::infinity()
    } else {
        y[order[best - 1]].abs()
    };

    Ok(MapEstimate {
        kappa_hat: best,
        threshold,
        mu_hat,
        objective,
    })
}

/// Log of the unnormalized posterior of an indicator vector `x`:
///
/// `-ln C(n, kappa) + ln pi(kappa) - sum_{i: x_i = 1} ln B_i` with `kappa = sum x_i`.
///
/// Exists to let exhaustive-enumeration tests check [`select_kappa`] against
/// the posterior it is supposed to maximize.
pub fn posterior_log_score<T: Real>(
    x: &[u8],
    seq: &NoisySequence<T>,
    prior: &PriorSpec<T>,
) -> Result<T> {
    let n = seq.len();
    if x.len() != n || n != prior.n() {
        return Err(Error::DimensionMismatch(format!(
            "indicator length {}, sequence length {n}, prior dimension {}",
            x.len(),
            prior.n()
        )));
    }
    if x.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("indicator vector must be 0/1".into()));
    }
    let kappa = x.iter().filter(|&&b| b == 1).count();
    let mut score = -ln_binomial::<T>(n, kappa) + prior.log_pi(kappa);
    for (i, &b) in x.iter().enumerate() {
        if b == 1 {
            score -= ln_bayes_factor(seq.y()[i], seq.sigma(), prior.gamma());
        }
    }
    Ok(score)
}

/// Two-sided bounds for `ln C(n, kappa)`, returned as `(lower, upper, exact)`:
/// `kappa ln(n/kappa) <= ln C(n, kappa) < kappa ln(ne/kappa)`, and additionally
/// `ln C(n, kappa) < 2 kappa ln(n/kappa)` whenever `kappa <= n/e`.
pub fn log_binom_bounds<T: Real>(n: usize, kappa: usize) -> Result<(T, T, T)> {
    if n < 2 || kappa < 1 || kappa > n - 1 {
        return Err(Error::InvalidInput(format!(
            "need n >= 2 and 1 <= kappa <= n-1, got n = {n}, kappa = {kappa}"
        )));
    }
    let kf = real::<T>(kappa as f64);
    let ratio = real::<T>(n as f64) / kf;
    let lower = kf * ratio.ln();
    let upper = kf * (ratio.ln() + T::one());
    let exact = ln_binomial::<T>(n, kappa);
    Ok((lower, upper, exact))
}

/// Result of checking the three adaptive-minimaxity prior conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorConditionReport {
    /// `pi(0) >= n^{-c1 n^{-beta}}`.
    pub origin_ok: bool,
    /// `pi(kappa) >= (kappa/n)^{c2 kappa}` for all `kappa = 1..=floor(alpha n)`.
    pub range_ok: bool,
    /// `pi(n) >= e^{-c0 n}`.
    pub full_ok: bool,
}

impl PriorConditionReport {
    pub fn all(&self) -> bool {
        self.origin_ok && self.range_ok && self.full_ok
    }
}

/// Evaluate the three prior conditions in log domain.
pub fn check_prior_conditions<T: Real>(
    prior: &PriorSpec<T>,
    beta: T,
    c0: T,
    c1: T,
    c2: T,
    alpha: T,
) -> PriorConditionReport {
    debug_assert!(beta >= T::zero());
    debug_assert!(alpha > T::zero() && alpha < T::one());
    let n = prior.n();
    let nf = real::<T>(n as f64);

    let origin_ok = prior.log_pi(0) >= -c1 * nf.powf(-beta) * nf.ln();

    let kmax = (alpha.to_f64().unwrap() * n as f64).floor() as usize;
    let mut range_ok = true;
    for kappa in 1..=kmax.min(n) {
        let kf = real::<T>(kappa as f64);
        if prior.log_pi(kappa) < c2 * kf * (kf / nf).ln() {
            range_ok = false;
            break;
        }
    }

    let full_ok = prior.log_pi(n) >= -c0 * nf;

    PriorConditionReport {
        origin_ok,
        range_ok,
        full_ok,
    }
}
