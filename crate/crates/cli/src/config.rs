//! Optional `amar.toml` configuration.
//!
//! Flat `key = value` lines, for example
//!
//! ```toml
//! p = "auto"          # or an integer order
//! zeta = "auto"       # or a positive threshold
//! qmax = 10
//! intervals = "all"   # "auto", "all" or "random:M"
//! seed = 7
//! test_fraction = 0.3
//! threads = 4
//! ```
//!
//! Command-line flags take precedence over the file, which takes
//! precedence over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use amar_core::estimate::{FitOptions, IntervalChoice, OrderChoice, ThresholdChoice};

use crate::exit::Failure;

pub const DEFAULT_CONFIG_FILE: &str = "amar.toml";
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TEST_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub p: Option<ConfigValue>,
    pub zeta: Option<ConfigValue>,
    pub qmax: Option<usize>,
    pub intervals: Option<String>,
    pub seed: Option<u64>,
    pub test_fraction: Option<f64>,
    pub threads: Option<usize>,
}

/// Accepts both `p = 8` and `p = "auto"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ConfigValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ConfigValue {
    fn as_flag(&self) -> String {
        match self {
            ConfigValue::Int(v) => v.to_string(),
            ConfigValue::Float(v) => v.to_string(),
            ConfigValue::Text(s) => s.clone(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Failure::Usage(format!("invalid config: {e}")).into())
    }

    /// Loads `explicit` if given, else `amar.toml` from the working
    /// directory when it exists.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let path: PathBuf = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let default = PathBuf::from(DEFAULT_CONFIG_FILE);
                if !default.exists() {
                    return Ok(Self::default());
                }
                default
            }
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(|e| Failure::Usage(format!("{e:#}")))?;
        Self::parse(&text)
    }
}

/// Fit-related flags as given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitFlags {
    pub p: Option<String>,
    pub zeta: Option<String>,
    pub qmax: Option<usize>,
    pub intervals: Option<String>,
    pub seed: Option<u64>,
}

pub fn parse_order(s: &str) -> Result<OrderChoice> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(OrderChoice::Auto);
    }
    match s.parse::<usize>() {
        Ok(p) if p >= 1 => Ok(OrderChoice::Fixed(p)),
        _ => bail!(Failure::Usage(format!(
            "--p expects 'auto' or an integer >= 1, got '{s}'"
        ))),
    }
}

pub fn parse_threshold(s: &str) -> Result<ThresholdChoice> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(ThresholdChoice::Auto);
    }
    match s.parse::<f64>() {
        Ok(z) if z > 0.0 && z.is_finite() => Ok(ThresholdChoice::Fixed(z)),
        _ => bail!(Failure::Usage(format!(
            "--zeta expects 'auto' or a positive number, got '{s}'"
        ))),
    }
}

pub fn parse_intervals(s: &str) -> Result<IntervalChoice> {
    match s {
        "auto" => Ok(IntervalChoice::Auto),
        "all" => Ok(IntervalChoice::AllPairs),
        _ => match s.strip_prefix("random:").map(str::parse::<usize>) {
            Some(Ok(m)) if m >= 1 => Ok(IntervalChoice::Random { m }),
            _ => bail!(Failure::Usage(format!(
                "--intervals expects 'auto', 'all' or 'random:M', got '{s}'"
            ))),
        },
    }
}

/// Merges flags, config and defaults into fit options.
pub fn fit_options(flags: &FitFlags, config: &Config) -> Result<FitOptions> {
    let mut opts = FitOptions::default();
    if let Some(p) = flags
        .p
        .clone()
        .or_else(|| config.p.as_ref().map(ConfigValue::as_flag))
    {
        opts.p = parse_order(&p)?;
    }
    if let Some(z) = flags
        .zeta
        .clone()
        .or_else(|| config.zeta.as_ref().map(ConfigValue::as_flag))
    {
        opts.zeta = parse_threshold(&z)?;
    }
    if let Some(q) = flags.qmax.or(config.qmax) {
        if q == 0 {
            bail!(Failure::Usage("--qmax must be >= 1".into()));
        }
        opts.q_max = q;
    }
    if let Some(i) = flags.intervals.as_deref().or(config.intervals.as_deref()) {
        opts.intervals = parse_intervals(i)?;
    }
    opts.seed = resolve_seed(flags.seed, config);
    Ok(opts)
}

pub fn resolve_seed(flag: Option<u64>, config: &Config) -> u64 {
    flag.or(config.seed).unwrap_or(DEFAULT_SEED)
}

pub fn resolve_test_fraction(flag: Option<f64>, config: &Config) -> Result<f64> {
    let f = flag
        .or(config.test_fraction)
        .unwrap_or(DEFAULT_TEST_FRACTION);
    if !(f > 0.0 && f < 1.0) {
        bail!(Failure::Usage(format!(
            "test fraction must lie in (0, 1), got {f}"
        )));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let cfg =
            Config::parse("p = 8\nzeta = \"auto\"\nqmax = 4\nseed = 11\nintervals = \"random:50\"")
                .unwrap();
        let none = FitFlags::default();
        let o = fit_options(&none, &cfg).unwrap();
        assert_eq!(o.p, OrderChoice::Fixed(8));
        assert_eq!(o.q_max, 4);
        assert_eq!(o.seed, 11);
        assert_eq!(o.intervals, IntervalChoice::Random { m: 50 });

        let flags = FitFlags {
            p: Some("auto".into()),
            qmax: Some(6),
            seed: Some(3),
            ..FitFlags::default()
        };
        let o = fit_options(&flags, &cfg).unwrap();
        assert_eq!(o.p, OrderChoice::Auto);
        assert_eq!(o.q_max, 6);
        assert_eq!(o.seed, 3);

        let o = fit_options(&none, &Config::default()).unwrap();
        assert_eq!(o, FitOptions::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_order("0").is_err());
        assert!(parse_order("x").is_err());
        assert!(parse_threshold("-1").is_err());
        assert_eq!(
            parse_threshold("0.25").unwrap(),
            ThresholdChoice::Fixed(0.25)
        );
        assert!(parse_intervals("random:").is_err());
        assert!(Config::parse("bogus = 1").is_err());
        assert!(resolve_test_fraction(Some(1.0), &Config::default()).is_err());
    }
}
