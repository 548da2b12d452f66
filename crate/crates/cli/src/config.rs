//! Flat key-value experiment configuration.
//!
//! The format is one `key = value` pair per line; `#` starts a comment and
//! blank lines are ignored. List values are comma-separated. Recognized keys
//! (unknown keys are a validation error):
//!
//! ```text
//! signals      = wave, peak            # required; any of the six signal names
//! rsnr         = 3, 5, 7               # required; positive reals
//! n            = 1024                  # power of two, default 1024
//! replications = 100                   # default 100
//! filter       = coif3                 # default coif3
//! j0           = 4                     # default 4
//! estimators   = map-levelwise, map-global, universal-hard   # default all three
//! seed         = 1                     # default 1
//! ```

use std::fmt;
use std::str::FromStr;

use mapshrink::{filter_bank, FILTER_NAMES, SIGNAL_NAMES};

use crate::{CliError, CliResult};

/// The estimators the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    MapLevelwise,
    MapGlobal,
    UniversalHard,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [
        EstimatorKind::MapLevelwise,
        EstimatorKind::MapGlobal,
        EstimatorKind::UniversalHard,
    ];
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::MapLevelwise => "map-levelwise",
            EstimatorKind::MapGlobal => "map-global",
            EstimatorKind::UniversalHard => "universal-hard",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "map-levelwise" | "levelwise" => Ok(EstimatorKind::MapLevelwise),
            "map-global" | "global" => Ok(EstimatorKind::MapGlobal),
            "universal-hard" | "universal" => Ok(EstimatorKind::UniversalHard),
            other => Err(format!(
                "unknown estimator `{other}` (expected map-levelwise, map-global, or universal-hard)"
            )),
        }
    }
}

/// Parsed and validated simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub signals: Vec<String>,
    pub rsnr_levels: Vec<f64>,
    pub n: usize,
    pub replications: usize,
    pub filter: String,
    pub j0: usize,
    pub estimators: Vec<EstimatorKind>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            signals: Vec::new(),
            rsnr_levels: Vec::new(),
            n: 1024,
            replications: 100,
            filter: "coif3".to_string(),
            j0: 4,
            estimators: EstimatorKind::ALL.to_vec(),
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    /// Parse the flat key-value grammar, reporting the offending field on error.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut saw_signals = false;
        let mut saw_rsnr = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let field_err = |msg: String| CliError::Validation(format!("field `{key}`: {msg}"));

            match key {
                "signals" => {
                    cfg.signals = split_list(value);
                    saw_signals = true;
                }
                "rsnr" => {
                    cfg.rsnr_levels = split_list(value)
                        .iter()
                        .map(|v| v.parse::<f64>().map_err(|e| field_err(e.to_string())))
                        .collect::<CliResult<_>>()?;
                    saw_rsnr = true;
                }
                "n" => {
                    cfg.n = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| field_err(e.to_string()))?
                }
                "replications" => {
                    cfg.replications = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| field_err(e.to_string()))?
                }
                "filter" => cfg.filter = value.to_string(),
                "j0" => {
                    cfg.j0 = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| field_err(e.to_string()))?
                }
                "estimators" => {
                    cfg.estimators = split_list(value)
                        .iter()
                        .map(|v| v.parse::<EstimatorKind>().map_err(&field_err))
                        .collect::<CliResult<_>>()?;
                }
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| field_err(e.to_string()))?
                }
                other => {
                    return Err(CliError::Validation(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }

        if !saw_signals {
            return Err(CliError::Validation("field `signals`: required".into()));
        }
        if !saw_rsnr {
            return Err(CliError::Validation("field `rsnr`: required".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let field =
            |name: &str, msg: String| CliError::Validation(format!("field `{name}`: {msg}"));
        if self.signals.is_empty() {
            return Err(field("signals", "must list at least one signal".into()));
        }
        for s in &self.signals {
            if !SIGNAL_NAMES.contains(&s.as_str()) {
                return Err(field(
                    "signals",
                    format!("unknown signal `{s}` (known: {})", SIGNAL_NAMES.join(", ")),
                ));
            }
        }
        if self.rsnr_levels.is_empty() {
            return Err(field("rsnr", "must list at least one level".into()));
        }
        if self
            .rsnr_levels
            .iter()
            .any(|&r| r.is_nan() || r <= 0.0 || !r.is_finite())
        {
            return Err(field("rsnr", "levels must be positive and finite".into()));
        }
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(field(
                "n",
                format!("must be a power of two >= 2, got {}", self.n),
            ));
        }
        if self.replications < 1 {
            return Err(field("replications", "must be >= 1".into()));
        }
        if filter_bank::<f64>(&self.filter).is_err() {
            return Err(field(
                "filter",
                format!(
                    "unknown filter `{}` (known: {})",
                    self.filter,
                    FILTER_NAMES.join(", ")
                ),
            ));
        }
        let levels = self.n.trailing_zeros() as usize;
        if self.j0 < 1 || self.j0 >= levels {
            return Err(field("j0", format!("need 1 <= j0 < log2(n) = {levels}")));
        }
        if self.estimators.is_empty() {
            return Err(field(
                "estimators",
                "must list at least one estimator".into(),
            ));
        }
        Ok(())
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::parse(
            "# demo\nsignals = wave, peak\nrsnr = 3, 5\nn = 512\nreplications = 10\n\
             filter = db4\nj0 = 3\nestimators = map-levelwise, universal-hard\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.signals, vec!["wave", "peak"]);
        assert_eq!(cfg.rsnr_levels, vec![3.0, 5.0]);
        assert_eq!(cfg.n, 512);
        assert_eq!(cfg.replications, 10);
        assert_eq!(cfg.filter, "db4");
        assert_eq!(cfg.j0, 3);
        assert_eq!(
            cfg.estimators,
            vec![EstimatorKind::MapLevelwise, EstimatorKind::UniversalHard]
        );
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn defaults_are_applied() {
        let cfg = ExperimentConfig::parse("signals = doppler\nrsnr = 7\n").unwrap();
        assert_eq!(cfg.n, 1024);
        assert_eq!(cfg.replications, 100);
        assert_eq!(cfg.filter, "coif3");
        assert_eq!(cfg.j0, 4);
        assert_eq!(cfg.estimators, EstimatorKind::ALL.to_vec());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ExperimentConfig::parse("rsnr = 3\n").is_err()); // missing signals
        assert!(ExperimentConfig::parse("signals = wave\n").is_err()); // missing rsnr
        let e = ExperimentConfig::parse("signals = nosuch\nrsnr = 3\n").unwrap_err();
        assert!(e.to_string().contains("signals"));
        let e = ExperimentConfig::parse("signals = wave\nrsnr = 3\nn = 1000\n").unwrap_err();
        assert!(e.to_string().contains("`n`"));
        let e = ExperimentConfig::parse("signals = wave\nrsnr = 3\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("bogus"));
        let e = ExperimentConfig::parse("signals = wave\nrsnr = 3\nfilter = sym4\n").unwrap_err();
        assert!(e.to_string().contains("filter"));
    }

    #[test]
    fn estimator_names_round_trip() {
        for kind in EstimatorKind::ALL {
            assert_eq!(kind.name().parse::<EstimatorKind>().unwrap(), kind);
        }
    }
}
