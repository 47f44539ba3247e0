//! Monte Carlo harness: model presets, accuracy metrics and aggregated
//! benchmark tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AmarError, Result};
use crate::estimate::{amar_fit, FitOptions};
use crate::forecast::{mspe, rolling_predictions};
use crate::model::{ar_to_amar, AmarModel, ArModel, Innovation, InnovationSpec};
use crate::simulate::{default_burn_in, replication_seed, simulate_ar};

/// Length of the out-of-sample segment appended to every simulated series.
pub const DEFAULT_TEST_LENGTH: usize = 100;
/// Replications per (model, T) cell at desk scale.
pub const DEFAULT_REPS: usize = 200;

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 15] = [
    "M1", "M2", "M3", "M4", "M5", "M6", "M1'", "M2'", "M3'", "M4'", "M5'", "M6'", "M7", "M8", "M9",
];

/// A benchmark generator, either in multiscale or in dense AR form.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetModel {
    Amar(AmarModel),
    Ar(ArModel),
}

impl PresetModel {
    /// True AR coefficients, of length `τ_q`.
    pub fn beta(&self) -> Vec<f64> {
        match self {
            PresetModel::Amar(m) => m
                .scale_model()
                .to_ar_coeffs(m.max_scale())
                .expect("order equals the largest scale"),
            PresetModel::Ar(b) => b.coeffs().to_vec(),
        }
    }

    /// The AMAR form; dense presets are converted exactly.
    pub fn amar(&self) -> Result<AmarModel> {
        match self {
            PresetModel::Amar(m) => Ok(m.clone()),
            PresetModel::Ar(b) => ar_to_amar(b),
        }
    }

    pub fn true_scales(&self) -> Result<Vec<usize>> {
        Ok(self.amar()?.scales().to_vec())
    }
}

/// Largest `k` with `k ≤ T^{0.4}`, i.e. `k⁵ ≤ T²`, computed in integers.
pub fn floor_t_pow_04(t: usize) -> usize {
    let t2 = (t as u128) * (t as u128);
    let mut k = (t as f64).powf(0.4).floor() as u128;
    while k > 0 && k.pow(5) > t2 {
        k -= 1;
    }
    while (k + 1).pow(5) <= t2 {
        k += 1;
    }
    k as usize
}

fn amar(scales: &[usize], alpha: &[f64]) -> Result<PresetModel> {
    AmarModel::new(scales.to_vec(), alpha.to_vec()).map(PresetModel::Amar)
}

/// Simulation presets with standard Gaussian innovations. `t` is required
/// by the presets whose long scale grows with the sample size (M6, M6').
///
/// Primed presets have a unit root. M7–M9 are dense high-order AR models.
pub fn preset(name: &str, t: Option<usize>) -> Result<PresetModel> {
    let growing = |alpha: f64| -> Result<PresetModel> {
        let t = t.ok_or_else(|| {
            AmarError::Precondition(format!("preset {name} needs the sample size T"))
        })?;
        let long = floor_t_pow_04(t);
        if long < 2 {
            return Err(AmarError::Precondition(format!(
                "preset {name} needs T >= 6 so that floor(T^0.4) >= 2"
            )));
        }
        amar(&[1, long], &[alpha, alpha])
    };
    match name {
        "M1" => amar(&[1, 3], &[0.3, 0.6]),
        "M2" => amar(&[2, 5], &[1.9, -1.0]),
        "M3" => amar(&[1, 5, 14], &[0.5, -1.0, 1.4]),
        "M4" => amar(&[1, 6, 7, 8], &[0.5, -4.8, 8.4, -3.2]),
        "M5" => amar(&[10], &[0.9]),
        "M6" => growing(0.49),
        "M1'" => amar(&[1, 3], &[0.4, 0.6]),
        "M2'" => amar(&[2, 5], &[1.5, -0.5]),
        "M3'" => amar(&[1, 5, 14], &[0.6, -1.0, 1.4]),
        "M4'" => amar(&[1, 6, 7, 8], &[1.0, -4.8, 11.2, -6.4]),
        "M5'" => amar(&[10], &[1.0]),
        "M6'" => growing(0.5),
        "M7" => Ok(PresetModel::Ar(ArModel::new(
            (1..=16)
                .map(|j| if j % 2 == 1 { 0.2 } else { -0.2 })
                .collect(),
        )?)),
        "M8" => Ok(PresetModel::Ar(ArModel::new(
            (1..=16)
                .map(|j| match j % 4 {
                    1 => 0.2,
                    0 => -0.2,
                    _ => 0.0,
                })
                .collect(),
        )?)),
        "M9" => Ok(PresetModel::Ar(ArModel::new(
            (1..=16)
                .map(|j| if (j - 1) % 4 < 2 { 0.2 } else { -0.2 })
                .collect(),
        )?)),
        _ => Err(AmarError::UnknownPreset(name.to_string())),
    }
}

/// Whether a preset is one of the unit-root variants.
pub fn is_unit_root_preset(name: &str) -> bool {
    name.ends_with('\'')
}

/// Hausdorff distance between two index sets. Two empty sets are at
/// distance 0; when exactly one is empty the distance is `sentinel`.
pub fn hausdorff(a: &[usize], b: &[usize], sentinel: usize) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return sentinel as f64,
        _ => {}
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|x| to.iter().map(|y| x.abs_diff(*y)).min().unwrap_or(0))
            .max()
            .unwrap_or(0)
    };
    directed(a, b).max(directed(b, a)) as f64
}

/// Minimum spacing `δ_T` (with `τ₀ = 0`, `τ_{q+1} = p`) and minimum
/// normalised jump `min |α_j| / τ_j`.
pub fn difficulty(model: &AmarModel, p: usize) -> Result<(usize, f64)> {
    if p < model.max_scale() {
        return Err(AmarError::InvalidOrder {
            p,
            max_scale: model.max_scale(),
        });
    }
    let mut prev = 0;
    let mut delta = usize::MAX;
    for &tau in model.scales().iter().chain(std::iter::once(&p)) {
        delta = delta.min(tau - prev);
        prev = tau;
    }
    let alpha_min = model
        .scales()
        .iter()
        .zip(model.coeffs())
        .map(|(t, a)| a.abs() / *t as f64)
        .fold(f64::INFINITY, f64::min);
    Ok((delta, alpha_min))
}

/// Euclidean distance between coefficient vectors, the shorter one padded
/// with zeros.
pub fn coeff_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let d = a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Mean and standard error (`sd / √n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    /// Summation runs in slice order so results are bitwise reproducible.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Stat {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Stat { mean, se: f64::NAN };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Stat {
            mean,
            se: (var / n as f64).sqrt(),
        }
    }
}

/// Metrics of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationMetrics {
    pub q_hat: usize,
    pub abs_q_error: f64,
    pub hausdorff: f64,
    /// `‖β̂ − β‖²` with `β̂` the coefficients implied by the fitted scales.
    pub beta_error: f64,
    pub mspe_fitted: f64,
    pub mspe_oracle: f64,
    pub exact_recovery: bool,
}

impl ReplicationMetrics {
    pub fn mspe_ratio_minus_one(&self) -> f64 {
        self.mspe_fitted / self.mspe_oracle - 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub model: String,
    pub t: usize,
    pub rep: usize,
    pub seed: u64,
    pub outcome: std::result::Result<ReplicationMetrics, String>,
}

/// One line of Tables-1/2-style output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub model: String,
    pub t: usize,
    /// Successful replications.
    pub reps: usize,
    /// Replications that failed and were excluded from the aggregates.
    pub failures: usize,
    pub abs_q_error: Stat,
    pub hausdorff: Stat,
    pub beta_error: Stat,
    pub mspe_ratio: Stat,
    pub exact_recovery: Stat,
}

impl BenchmarkRow {
    /// `(metric, mean, se)` triples in a fixed order.
    pub fn metrics(&self) -> Vec<(&'static str, f64, f64)> {
        vec![
            ("abs_q_error", self.abs_q_error.mean, self.abs_q_error.se),
            ("hausdorff", self.hausdorff.mean, self.hausdorff.se),
            ("beta_error", self.beta_error.mean, self.beta_error.se),
            (
                "mspe_ratio_minus_one",
                self.mspe_ratio.mean,
                self.mspe_ratio.se,
            ),
            (
                "exact_recovery",
                self.exact_recovery.mean,
                self.exact_recovery.se,
            ),
            ("failures", self.failures as f64, 0.0),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub models: Vec<String>,
    pub ts: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub test_len: usize,
    pub fit: FitOptions,
    /// Replaces the presets' Gaussian innovations when set.
    pub innovation: Option<Innovation>,
}

impl BenchConfig {
    pub fn new(models: &[&str], ts: &[usize], reps: usize, seed: u64) -> Self {
        Self {
            models: models.iter().map(|s| s.to_string()).collect(),
            ts: ts.to_vec(),
            reps,
            seed,
            test_len: DEFAULT_TEST_LENGTH,
            fit: FitOptions::default(),
            innovation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutput {
    pub rows: Vec<BenchmarkRow>,
    pub replications: Vec<ReplicationRecord>,
}

/// Default `q_max` for the dense high-order presets M7–M9.
pub const DENSE_PRESET_Q_MAX: usize = 20;

/// Fit options for a preset: the dense presets raise `q_max` to at least
/// [`DENSE_PRESET_Q_MAX`].
pub fn fit_options_for(name: &str, fit: &FitOptions) -> FitOptions {
    let mut fit = fit.clone();
    if matches!(name, "M7" | "M8" | "M9") {
        fit.q_max = fit.q_max.max(DENSE_PRESET_Q_MAX);
    }
    fit
}

/// Simulates, fits and scores one replication.
pub fn run_replication(
    name: &str,
    t: usize,
    seed: u64,
    test_len: usize,
    fit: &FitOptions,
    innovation: Option<Innovation>,
) -> Result<ReplicationMetrics> {
    let model = preset(name, Some(t))?;
    let truth = model.beta();
    let true_scales = model.true_scales()?;
    let kind = innovation.unwrap_or_default();
    let spec = InnovationSpec::new(kind, seed)?;
    let sim = simulate_ar(
        &truth,
        &spec,
        t + test_len,
        default_burn_in(truth.len()),
        is_unit_root_preset(name),
    )?;
    let (train, test) = sim.path.split_at(t);
    let report = amar_fit(train, &fit_options_for(name, fit))?;
    let fitted = report.scale_model();
    let pred = rolling_predictions(&fitted, test, train)?;
    let mspe_fitted = mspe(&pred, test);
    let mspe_oracle = sim.innovations[t..].iter().map(|e| e * e).sum::<f64>() / test_len as f64;
    let q_hat = report.q_hat();
    let beta_error = coeff_distance(report.beta_constrained.coeffs(), &truth).powi(2);
    Ok(ReplicationMetrics {
        q_hat,
        abs_q_error: q_hat.abs_diff(true_scales.len()) as f64,
        hausdorff: hausdorff(&report.scales, &true_scales, report.chosen_p),
        beta_error,
        mspe_fitted,
        mspe_oracle,
        exact_recovery: report.scales == true_scales,
    })
}

/// Aggregates successful replications into a row; failures are counted.
pub fn aggregate(model: &str, t: usize, records: &[ReplicationRecord]) -> BenchmarkRow {
    let ok: Vec<&ReplicationMetrics> = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect();
    let col = |f: &dyn Fn(&ReplicationMetrics) -> f64| -> Stat {
        Stat::from_samples(&ok.iter().map(|m| f(m)).collect::<Vec<_>>())
    };
    BenchmarkRow {
        model: model.to_string(),
        t,
        reps: ok.len(),
        failures: records.len() - ok.len(),
        abs_q_error: col(&|m| m.abs_q_error),
        hausdorff: col(&|m| m.hausdorff),
        beta_error: col(&|m| m.beta_error),
        mspe_ratio: col(&|m| m.mspe_ratio_minus_one()),
        exact_recovery: col(&|m| if m.exact_recovery { 1.0 } else { 0.0 }),
    }
}

/// Runs every (model, T) cell. Replication `r` uses seed `seed ^ r`.
/// Replications run in parallel on the current rayon pool; results are
/// reduced in replication order.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchmarkOutput> {
    if config.reps < 2 {
        return Err(AmarError::Precondition(
            "at least two replications are required".into(),
        ));
    }
    if config.test_len == 0 {
        return Err(AmarError::Precondition("test length must be >= 1".into()));
    }
    for name in &config.models {
        // Surface unknown names before spending time on simulation.
        preset(name, config.ts.first().copied())?;
    }
    let mut rows = Vec::new();
    let mut replications = Vec::new();
    for name in &config.models {
        for &t in &config.ts {
            let records: Vec<ReplicationRecord> = (0..config.reps)
                .into_par_iter()
                .map(|r| {
                    let seed = replication_seed(config.seed, r as u64);
                    let outcome = run_replication(
                        name,
                        t,
                        seed,
                        config.test_len,
                        &config.fit,
                        config.innovation,
                    )
                    .map_err(|e| e.to_string());
                    ReplicationRecord {
                        model: name.clone(),
                        t,
                        rep: r,
                        seed,
                        outcome,
                    }
                })
                .collect();
            rows.push(aggregate(name, t, &records));
            replications.extend(records);
        }
    }
    Ok(BenchmarkOutput { rows, replications })
}
