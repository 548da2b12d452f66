//! Orthonormal periodized discrete wavelet transform.
//!
//! The analysis step correlates the signal with the lowpass/highpass pair and
//! downsamples by two, wrapping indices modulo the current length; synthesis
//! is the exact transpose. Because the filter pair satisfies the quadrature
//! mirror conditions, the periodized transform is orthogonal at every dyadic
//! length, so reconstruction is exact and energy is preserved.

mod taps;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// An orthonormal two-channel filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter<T> {
    name: String,
    lowpass: Vec<T>,
    highpass: Vec<T>,
}

impl<T: Real> WaveletFilter<T> {
    /// Build a filter from lowpass taps, deriving the highpass by the
    /// quadrature-mirror relation `g[k] = (-1)^k h[L-1-k]` and validating the
    /// moment identities `sum h = sqrt(2)` and `sum h^2 = 1`.
    pub fn from_lowpass(name: impl Into<String>, lowpass: Vec<T>) -> Result<Self> {
        let name = name.into();
        if lowpass.len() < 2 || !lowpass.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "filter `{name}` must have a positive even number of taps"
            )));
        }
        let sum: T = lowpass.iter().cloned().sum();
        let energy: T = lowpass.iter().map(|&h| h * h).sum();
        let tol = T::tolerance(1e-10);
        if (sum - real::<T>(std::f64::consts::SQRT_2)).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "filter `{name}` taps sum to {sum}, expected sqrt(2)"
            )));
        }
        if (energy - T::one()).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "filter `{name}` taps have energy {energy}, expected 1"
            )));
        }
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        Ok(Self {
            name,
            lowpass,
            highpass,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lowpass(&self) -> &[T] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[T] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }
}

/// Look up a named filter: `haar`, `db2`..`db10`, or `coif1`..`coif5`.
pub fn filter_bank<T: Real>(name: &str) -> Result<WaveletFilter<T>> {
    let taps: &[f64] = match name {
        "haar" => &taps::HAAR,
        "db2" => &taps::DB2,
        "db3" => &taps::DB3,
        "db4" => &taps::DB4,
        "db5" => &taps::DB5,
        "db6" => &taps::DB6,
        "db7" => &taps::DB7,
        "db8" => &taps::DB8,
        "db9" => &taps::DB9,
        "db10" => &taps::DB10,
        "coif1" => &taps::COIF1,
        "coif2" => &taps::COIF2,
        "coif3" => &taps::COIF3,
        "coif4" => &taps::COIF4,
        "coif5" => &taps::COIF5,
        _ => return Err(Error::UnsupportedFilter(name.to_string())),
    };
    WaveletFilter::from_lowpass(name, taps.iter().map(|&h| real::<T>(h)).collect())
}

/// Names accepted by [`filter_bank`], in documentation order.
pub const FILTER_NAMES: [&str; 15] = [
    "haar", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "db9", "db10", "coif1", "coif2",
    "coif3", "coif4", "coif5",
];

/// Multiresolution decomposition of a length-`2^J` signal.
///
/// `scaling` holds the `2^{j0}` coarse coefficients; `details[i]` holds the
/// `2^{j0+i}` detail coefficients of level `j0 + i`, for levels `j0..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition<T> {
    j0: usize,
    levels: usize,
    scaling: Vec<T>,
    details: Vec<Vec<T>>,
}

impl<T: Real> WaveletDecomposition<T> {
    /// Coarsest detail level.
    pub fn j0(&self) -> usize {
        self.j0
    }

    /// `J = log2(n)`; detail levels run over `j0..J`.
    pub fn finest_level(&self) -> usize {
        self.levels
    }

    pub fn signal_len(&self) -> usize {
        1 << self.levels
    }

    pub fn scaling(&self) -> &[T] {
        &self.scaling
    }

    pub fn scaling_mut(&mut self) -> &mut [T] {
        &mut self.scaling
    }

    /// Detail coefficients of level `j` (`j0 <= j < J`).
    pub fn detail(&self, j: usize) -> &[T] {
        &self.details[j - self.j0]
    }

    pub fn detail_mut(&mut self, j: usize) -> &mut [T] {
        let j0 = self.j0;
        &mut self.details[j - j0]
    }

    pub fn detail_levels(&self) -> impl Iterator<Item = usize> {
        self.j0..self.levels
    }

    /// Total number of detail coefficients, `2^J - 2^{j0}`.
    pub fn detail_count(&self) -> usize {
        self.details.iter().map(Vec::len).sum()
    }

    pub fn nonzero_detail_count(&self) -> usize {
        self.details
            .iter()
            .flat_map(|d| d.iter())
            .filter(|&&v| v != T::zero())
            .count()
    }

    /// All detail coefficients, coarsest level first.
    pub fn pooled_details(&self) -> Vec<T> {
        self.details
            .iter()
            .flat_map(|d| d.iter().cloned())
            .collect()
    }

    /// Overwrite the detail coefficients from a pooled vector laid out as
    /// produced by [`Self::pooled_details`].
    pub fn set_pooled_details(&mut self, pooled: &[T]) -> Result<()> {
        if pooled.len() != self.detail_count() {
            return Err(Error::DimensionMismatch(format!(
                "pooled length {} vs detail count {}",
                pooled.len(),
                self.detail_count()
            )));
        }
        let mut offset = 0;
        for d in &mut self.details {
            let len = d.len();
            d.copy_from_slice(&pooled[offset..offset + len]);
            offset += len;
        }
        Ok(())
    }

    /// Sum of squares over every stored coefficient.
    pub fn energy(&self) -> T {
        let det: T = self
            .details
            .iter()
            .flat_map(|d| d.iter())
            .map(|&v| v * v)
            .sum();
        let sc: T = self.scaling.iter().map(|&v| v * v).sum();
        det + sc
    }

    fn validate_shape(&self) -> Result<()> {
        if self.j0 < 1 || self.j0 >= self.levels {
            return Err(Error::InvalidInput(format!(
                "need 1 <= j0 < J, got j0 = {}, J = {}",
                self.j0, self.levels
            )));
        }
        if self.scaling.len() != 1 << self.j0 {
            return Err(Error::InvalidInput(format!(
                "scaling block has {} coefficients, expected {}",
                self.scaling.len(),
                1 << self.j0
            )));
        }
        if self.details.len() != self.levels - self.j0 {
            return Err(Error::InvalidInput(format!(
                "expected {} detail levels, got {}",
                self.levels - self.j0,
                self.details.len()
            )));
        }
        for (i, d) in self.details.iter().enumerate() {
            if d.len() != 1 << (self.j0 + i) {
                return Err(Error::InvalidInput(format!(
                    "level {} has {} coefficients, expected {}",
                    self.j0 + i,
                    d.len(),
                    1 << (self.j0 + i)
                )));
            }
        }
        Ok(())
    }

    /// Assemble a decomposition from parts, validating the level shapes.
    pub fn from_parts(j0: usize, scaling: Vec<T>, details: Vec<Vec<T>>) -> Result<Self> {
        let levels = j0 + details.len();
        let out = Self {
            j0,
            levels,
            scaling,
            details,
        };
        out.validate_shape()?;
        Ok(out)
    }
}

fn check_analysis_args(n: usize, j0: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "signal length must be a power of two >= 2, got {n}"
        )));
    }
    let levels = n.trailing_zeros() as usize;
    if j0 < 1 {
        return Err(Error::InvalidParameter(
            "primary level j0 must be >= 1".into(),
        ));
    }
    if j0 >= levels {
        return Err(Error::InvalidParameter(format!(
            "primary level j0 = {j0} leaves no detail levels for n = {n} (need j0 < {levels})"
        )));
    }
    Ok(levels)
}

/// One analysis step: periodized correlation with both filters, downsample by 2.
fn analysis_step<T: Real>(input: &[T], filter: &WaveletFilter<T>) -> (Vec<T>, Vec<T>) {
    let n = input.len();
    let half = n / 2;
    let taps = filter.len();
    let mut approx = vec![T::zero(); half];
    let mut detail = vec![T::zero(); half];
    for k in 0..half {
        let mut a = T::zero();
        let mut d = T::zero();
        for j in 0..taps {
            let idx = (2 * k + j) % n;
            a += filter.lowpass[j] * input[idx];
            d += filter.highpass[j] * input[idx];
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

/// One synthesis step: the transpose of [`analysis_step`].
fn synthesis_step<T: Real>(approx: &[T], detail: &[T], filter: &WaveletFilter<T>) -> Vec<T> {
    let half = approx.len();
    let n = half * 2;
    let taps = filter.len();
    let mut out = vec![T::zero(); n];
    for k in 0..half {
        for j in 0..taps {
            let idx = (2 * k + j) % n;
            out[idx] += filter.lowpass[j] * approx[k] + filter.highpass[j] * detail[k];
        }
    }
    out
}

/// Forward periodized transform down to primary level `j0`.
pub fn dwt_forward<T: Real>(
    signal: &[T],
    filter: &WaveletFilter<T>,
    j0: usize,
) -> Result<WaveletDecomposition<T>> {
    let levels = check_analysis_args(signal.len(), j0)?;
    let mut current = signal.to_vec();
    let mut details_rev: Vec<Vec<T>> = Vec::with_capacity(levels - j0);
    while current.len() > 1 << j0 {
        let (approx, detail) = analysis_step(&current, filter);
        details_rev.push(detail);
        current = approx;
    }
    details_rev.reverse();
    Ok(WaveletDecomposition {
        j0,
        levels,
        scaling: current,
        details: details_rev,
    })
}

/// Inverse transform; exact up to floating-point rounding.
pub fn dwt_inverse<T: Real>(
    decomp: &WaveletDecomposition<T>,
    filter: &WaveletFilter<T>,
) -> Result<Vec<T>> {
    decomp.validate_shape()?;
    let mut current = decomp.scaling.clone();
    for detail in &decomp.details {
        current = synthesis_step(&current, detail, filter);
    }
    Ok(current)
}
