//! MAP model selection for sparse Gaussian means, with a wavelet-domain
//! denoising front end.
//!
//! The estimator treats mean recovery as simultaneous testing of the point
//! nulls `mu_i = 0`: a prior on the number of non-zero entries combined with
//! a Gaussian slab turns posterior maximization into a penalized residual
//! minimization over the model size, and the resulting rule is hard
//! thresholding at a data-chosen magnitude. Applied level by level to the
//! coefficients of an orthonormal periodized wavelet transform (with the
//! hyperparameters fitted by conditional likelihood), it denoises sampled
//! functions; applied to the pooled coefficients it gives the global variant.
//!
//! Modules:
//!
//! - [`map`]: priors on the model size, Bayes factors, the complexity
//!   penalty, model-size selection, and the binomial-coefficient bounds.
//! - [`wavelet`]: the periodized orthonormal transform and its filter bank.
//! - [`estimators`]: noise-level estimation, hyperparameter fitting, the
//!   level-wise/global/universal denoisers, and the weighted coefficient risk.
//! - [`balls`]: l_p-ball zones, minimax rate formulas, worst-case means, and
//!   Monte Carlo risk.
//! - [`testbed`]: benchmark signals, seeded noise, and metrics.
//!
//! All numeric code is generic over [`scalar::Real`] (`f32` or `f64`);
//! `*F64` aliases below pin the common double-precision instantiation.

pub mod balls;
pub mod error;
pub mod estimators;
pub mod map;
pub mod scalar;
pub mod testbed;
pub mod wavelet;

pub use error::{Error, Result};
pub use scalar::Real;

pub use balls::{
    alpha_default, alpha_for_gamma, least_favorable, minimax_rate, minimax_rate_in_zone,
    monte_carlo_risk, zone_classify, LpBallSpec, RiskEstimate, Zone,
};
pub use estimators::{
    denoise_global, denoise_levelwise, denoise_universal, estimate_sigma_mad, fit_level,
    fit_level_profile, hyperparameters_at, weighted_level_risk, DenoiseResult, LevelFit,
};
pub use map::{
    bayes_factor, check_prior_conditions, complexity_penalty, log_binom_bounds,
    posterior_log_score, select_kappa, MapEstimate, NoisySequence, PriorConditionReport, PriorSpec,
};
pub use testbed::{
    add_noise, make_signal, mse, population_sd, signal_to_csv, NoisyObservation, TestSignal,
    SIGNAL_NAMES,
};
pub use wavelet::{
    dwt_forward, dwt_inverse, filter_bank, WaveletDecomposition, WaveletFilter, FILTER_NAMES,
};

/// Double-precision aliases for the generic containers.
pub type PriorSpecF64 = PriorSpec<f64>;
pub type NoisySequenceF64 = NoisySequence<f64>;
pub type MapEstimateF64 = MapEstimate<f64>;
pub type LpBallSpecF64 = LpBallSpec<f64>;
pub type RiskEstimateF64 = RiskEstimate<f64>;
pub type WaveletFilterF64 = WaveletFilter<f64>;
pub type WaveletDecompositionF64 = WaveletDecomposition<f64>;
pub type LevelFitF64 = LevelFit<f64>;
pub type DenoiseResultF64 = DenoiseResult<f64>;
pub type TestSignalF64 = TestSignal<f64>;
pub type NoisyObservationF64 = NoisyObservation<f64>;
