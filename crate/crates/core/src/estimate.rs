//! AMAR estimation: OLS AR(p) fit, NOT timescale detection on the fitted
//! coefficients, refit of the scale coefficients, and SIC-driven choice of
//! the threshold and of the AR order.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AmarError, Result};
use crate::linalg::least_squares;
use crate::model::{ArModel, ScaleModel};
use crate::not::{generate_intervals, IntervalMode, NotDetector};

/// Default constant in the threshold rate `C·T^{-1/2}(log T)^{3/2}`.
pub const DEFAULT_THRESHOLD_CONSTANT: f64 = 0.5;
/// Default cap on the number of detected timescales.
pub const DEFAULT_Q_MAX: usize = 10;
/// Number of points in the automatic threshold grid.
pub const AUTO_GRID_POINTS: usize = 32;
/// Shortest series accepted by [`amar_fit`].
pub const MIN_FIT_LENGTH: usize = 32;

/// OLS fit of an AR(p) model without intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub beta: ArModel,
    /// Residual sum of squares over rows `p+1..=T`.
    pub rss: f64,
    /// `rss / (T − p)`.
    pub residual_variance: f64,
}

/// OLS fit of the scale coefficients for a fixed set of timescales.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFit {
    pub model: ScaleModel,
    pub rss: f64,
    pub residual_variance: f64,
}

/// One evaluated (threshold, order) candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SicEntry {
    pub zeta: f64,
    pub p: usize,
    pub q_hat: usize,
    /// `None` when the candidate exceeded `q_max` and was not scored.
    pub sic: Option<f64>,
}

/// Output of the AMAR estimation procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub scales: Vec<usize>,
    pub alpha: Vec<f64>,
    pub beta_unconstrained: ArModel,
    pub beta_constrained: ArModel,
    pub chosen_zeta: f64,
    pub chosen_p: usize,
    pub sic_trace: Vec<SicEntry>,
    pub residual_variance: f64,
}

impl FitReport {
    pub fn q_hat(&self) -> usize {
        self.scales.len()
    }

    pub fn scale_model(&self) -> ScaleModel {
        ScaleModel {
            scales: self.scales.clone(),
            alpha: self.alpha.clone(),
        }
    }

    /// SIC of the selected candidate.
    pub fn sic(&self) -> Option<f64> {
        self.sic_trace
            .iter()
            .find(|e| e.p == self.chosen_p && e.zeta == self.chosen_zeta)
            .and_then(|e| e.sic)
    }
}

/// How the AR order is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderChoice {
    Fixed(usize),
    /// SIC over `{1, 2, 4, …} ∩ [1, ⌈√T⌉]`.
    Auto,
}

/// How the threshold is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThresholdChoice {
    Fixed(f64),
    Grid(Vec<f64>),
    /// SIC over the geometric grid of [`auto_zeta_grid`].
    Auto,
}

/// Interval family used by NOT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalChoice {
    /// All pairs up to order 500, 10 000 random intervals above.
    Auto,
    AllPairs,
    Random {
        m: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub p: OrderChoice,
    pub zeta: ThresholdChoice,
    pub q_max: usize,
    pub intervals: IntervalChoice,
    /// Seed for random intervals.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            p: OrderChoice::Auto,
            zeta: ThresholdChoice::Auto,
            q_max: DEFAULT_Q_MAX,
            intervals: IntervalChoice::Auto,
            seed: 0,
        }
    }
}

impl FitOptions {
    fn interval_mode(&self, p: usize) -> IntervalMode {
        match self.intervals {
            IntervalChoice::Auto => IntervalMode::auto(p, self.seed),
            IntervalChoice::AllPairs => IntervalMode::AllPairs,
            IntervalChoice::Random { m } => IntervalMode::Random { m, seed: self.seed },
        }
    }
}

/// OLS estimate of `β` in `x_t = Σ_{j≤p} β_j x_{t−j} + ε_t`, rows `t = p+1..=T`.
pub fn fit_ar_ols(x: &[f64], p: usize) -> Result<ArFit> {
    if p == 0 {
        return Err(AmarError::Precondition("AR order must be >= 1".into()));
    }
    let t = x.len();
    if t <= 2 * p {
        return Err(AmarError::InsufficientData {
            needed: 2 * p + 1,
            got: t,
        });
    }
    let n = t - p;
    let design = DMatrix::from_fn(n, p, |r, j| x[p + r - 1 - j]);
    let y = DVector::from_column_slice(&x[p..]);
    let sol = least_squares(design, &y).map_err(|e| {
        AmarError::SingularDesign(format!(
            "lag {} is collinear with shorter lags",
            e.column + 1
        ))
    })?;
    Ok(ArFit {
        beta: ArModel::new(sol.coef)?,
        rss: sol.rss,
        residual_variance: sol.rss / n as f64,
    })
}

/// Running-mean regressor of span `tau` at (0-based) time index `i`, using
/// `prefix[k] = x_0 + … + x_{k−1}`.
#[inline]
fn running_mean(prefix: &[f64], i: usize, tau: usize) -> f64 {
    (prefix[i] - prefix[i - tau]) / tau as f64
}

fn prefix_sums(x: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(x.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += v;
        p.push(acc);
    }
    p
}

/// OLS of `x_t` on the running means over the given timescales, rows
/// `t = τ_q+1..=T`.
pub fn refit_scales(x: &[f64], scales: &[usize]) -> Result<ScaleFit> {
    let max = scales.last().copied().unwrap_or(0);
    refit_scales_from(x, scales, max + 1)
}

/// Like [`refit_scales`] with an explicit first (1-based) estimation row,
/// which must exceed the largest timescale.
pub fn refit_scales_from(x: &[f64], scales: &[usize], first_row: usize) -> Result<ScaleFit> {
    if scales.is_empty() {
        return Err(AmarError::Precondition(
            "refit needs at least one timescale".into(),
        ));
    }
    if scales.windows(2).any(|w| w[0] == w[1]) {
        return Err(AmarError::SingularDesign(format!(
            "duplicate timescales in {scales:?}"
        )));
    }
    ScaleModel::new(scales.to_vec(), vec![0.0; scales.len()])?;
    let max = *scales.last().expect("nonempty");
    let t = x.len();
    if 2 * max >= t {
        return Err(AmarError::InsufficientData {
            needed: 2 * max + 1,
            got: t,
        });
    }
    if first_row <= max || first_row > t {
        return Err(AmarError::Precondition(format!(
            "first estimation row {first_row} must lie in {}..={t}",
            max + 1
        )));
    }
    let n = t - first_row + 1;
    if n <= scales.len() {
        return Err(AmarError::InsufficientData {
            needed: first_row + scales.len(),
            got: t,
        });
    }
    let prefix = prefix_sums(x);
    let start = first_row - 1;
    let design = DMatrix::from_fn(n, scales.len(), |r, k| {
        running_mean(&prefix, start + r, scales[k])
    });
    let y = DVector::from_column_slice(&x[start..]);
    let sol = least_squares(design, &y).map_err(|e| {
        AmarError::SingularDesign(format!(
            "running mean over {} lags is collinear with shorter scales",
            scales[e.column]
        ))
    })?;
    Ok(ScaleFit {
        model: ScaleModel {
            scales: scales.to_vec(),
            alpha: sol.coef,
        },
        rss: sol.rss,
        residual_variance: sol.rss / n as f64,
    })
}

/// In-sample one-step predictions `X̂_1 … X̂_T`, with unobserved values
/// before `t = 1` set to the sample mean.
pub fn in_sample_predictions(x: &[f64], model: &ScaleModel) -> Vec<f64> {
    let t = x.len();
    if model.scales.is_empty() || t == 0 {
        return vec![0.0; t];
    }
    let back = model.max_scale();
    let mean = x.iter().sum::<f64>() / t as f64;
    let mut extended = vec![mean; back];
    extended.extend_from_slice(x);
    let prefix = prefix_sums(&extended);
    (0..t)
        .map(|i| {
            let idx = back + i;
            model
                .scales
                .iter()
                .zip(&model.alpha)
                .map(|(&tau, &a)| a * running_mean(&prefix, idx, tau))
                .sum()
        })
        .collect()
}

/// Schwarz criterion `T·log(RSS) + 2·q̂·log(T)` with RSS over `t = 1..=T`.
/// Returns `−∞` for a perfect fit.
pub fn sic_score(x: &[f64], model: &ScaleModel) -> f64 {
    let t = x.len() as f64;
    let rss: f64 = x
        .iter()
        .zip(in_sample_predictions(x, model))
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if rss == 0.0 {
        return f64::NEG_INFINITY;
    }
    t * rss.ln() + 2.0 * model.q() as f64 * t.ln()
}

/// `C·T^{-1/2}(ln T)^{3/2}`.
pub fn default_threshold(t: f64, c: f64) -> f64 {
    c * t.powf(-0.5) * t.ln().powf(1.5)
}

/// Geometric grid of [`AUTO_GRID_POINTS`] thresholds from `20·ζ₀` down to
/// `0.05·ζ₀`, where `ζ₀` is the default threshold.
pub fn auto_zeta_grid(t: usize) -> Vec<f64> {
    let z0 = default_threshold(t as f64, DEFAULT_THRESHOLD_CONSTANT);
    let (hi, lo) = (20.0 * z0, 0.05 * z0);
    let n = AUTO_GRID_POINTS;
    let ratio = (lo / hi).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| hi * ratio.powi(i as i32)).collect()
}

/// Candidate AR orders `{1, 2, 4, …} ∩ [1, ⌈√T⌉]`.
pub fn order_grid(t: usize) -> Vec<usize> {
    let cap = (t as f64).sqrt().ceil() as usize;
    std::iter::successors(Some(1usize), |p| Some(p * 2))
        .take_while(|p| *p <= cap)
        .collect()
}

/// NOT on a coefficient vector; the detection layer of the algorithm, usable
/// directly on an injected `β̂`.
pub fn detect_scales(beta: &[f64], mode: IntervalMode, zeta: f64) -> Result<Vec<usize>> {
    if beta.len() < 2 {
        return Ok(Vec::new());
    }
    let set = generate_intervals(beta.len(), mode)?;
    crate::not::not_detect(beta, &set, zeta)
}

struct Candidate {
    zeta: f64,
    p: usize,
    fit: ScaleModel,
    residual_variance: f64,
    sic: f64,
}

/// Scores every threshold of `grid` at a fixed order. Returns the fitted AR
/// model, the trace and the best feasible candidate, if any.
fn evaluate_order(
    x: &[f64],
    p: usize,
    q_max: usize,
    grid: &[f64],
    mode: IntervalMode,
) -> Result<(ArFit, Vec<SicEntry>, Option<Candidate>)> {
    let ar = fit_ar_ols(x, p)?;
    let detector = if p >= 2 {
        Some(NotDetector::new(
            ar.beta.coeffs(),
            &generate_intervals(p, mode)?,
        )?)
    } else {
        None
    };

    let mut zetas = grid.to_vec();
    zetas.sort_by(|a, b| b.total_cmp(a));
    zetas.dedup();

    let mut cache: HashMap<Vec<usize>, (ScaleModel, f64, f64)> = HashMap::new();
    let mut trace = Vec::with_capacity(zetas.len());
    let mut best: Option<Candidate> = None;
    for zeta in zetas {
        let scales = detector.as_ref().map_or_else(Vec::new, |d| d.detect(zeta));
        let q_hat = scales.len();
        if q_hat > q_max {
            trace.push(SicEntry {
                zeta,
                p,
                q_hat,
                sic: None,
            });
            continue;
        }
        if !cache.contains_key(&scales) {
            let (model, var) = if scales.is_empty() {
                let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
                (ScaleModel::empty(), var)
            } else {
                let f = refit_scales(x, &scales)?;
                (f.model, f.residual_variance)
            };
            let sic = sic_score(x, &model);
            cache.insert(scales.clone(), (model, var, sic));
        }
        let (model, var, sic) = &cache[&scales];
        trace.push(SicEntry {
            zeta,
            p,
            q_hat,
            sic: Some(*sic),
        });
        // Descending grid + strict comparison keeps the larger ζ on ties.
        if best.as_ref().is_none_or(|b| *sic < b.sic) {
            best = Some(Candidate {
                zeta,
                p,
                fit: model.clone(),
                residual_variance: *var,
                sic: *sic,
            });
        }
    }
    Ok((ar, trace, best))
}

fn report(ar: ArFit, best: Candidate, trace: Vec<SicEntry>) -> Result<FitReport> {
    let beta_constrained = ArModel::new(best.fit.to_ar_coeffs(best.p)?)?;
    Ok(FitReport {
        scales: best.fit.scales,
        alpha: best.fit.alpha,
        beta_unconstrained: ar.beta,
        beta_constrained,
        chosen_zeta: best.zeta,
        chosen_p: best.p,
        sic_trace: trace,
        residual_variance: best.residual_variance,
    })
}

/// Fixed order, SIC-minimising threshold over `grid` subject to `q̂ ≤ q_max`.
pub fn select_threshold(
    x: &[f64],
    p: usize,
    q_max: usize,
    zeta_grid: &[f64],
    mode: IntervalMode,
) -> Result<FitReport> {
    if zeta_grid.is_empty() {
        return Err(AmarError::Precondition("threshold grid is empty".into()));
    }
    check_grid(zeta_grid)?;
    let (ar, trace, best) = evaluate_order(x, p, q_max, zeta_grid, mode)?;
    let best = best.ok_or(AmarError::InfeasibleThreshold { q_max })?;
    report(ar, best, trace)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if let Some(z) = grid.iter().find(|z| **z <= 0.0 || !z.is_finite()) {
        return Err(AmarError::Precondition(format!(
            "thresholds must be positive and finite, got {z}"
        )));
    }
    Ok(())
}

/// Joint SIC minimisation over the order grid and the threshold grid.
/// Ties go to the smaller order, then to the larger threshold.
pub fn select_p(
    x: &[f64],
    q_max: usize,
    zeta_grid: &[f64],
    intervals: IntervalChoice,
    seed: u64,
) -> Result<FitReport> {
    if x.len() < 16 {
        return Err(AmarError::InsufficientData {
            needed: 16,
            got: x.len(),
        });
    }
    if zeta_grid.is_empty() {
        return Err(AmarError::Precondition("threshold grid is empty".into()));
    }
    check_grid(zeta_grid)?;
    let opts = FitOptions {
        intervals,
        seed,
        ..FitOptions::default()
    };
    let mut trace = Vec::new();
    let mut best: Option<(ArFit, Candidate)> = None;
    for p in order_grid(x.len()) {
        let (ar, tr, cand) = evaluate_order(x, p, q_max, zeta_grid, opts.interval_mode(p))?;
        trace.extend(tr);
        if let Some(c) = cand {
            if best.as_ref().is_none_or(|(_, b)| c.sic < b.sic) {
                best = Some((ar, c));
            }
        }
    }
    let (ar, best) = best.ok_or(AmarError::InfeasibleThreshold { q_max })?;
    report(ar, best, trace)
}

/// The full estimation procedure.
pub fn amar_fit(x: &[f64], options: &FitOptions) -> Result<FitReport> {
    if x.len() < MIN_FIT_LENGTH {
        return Err(AmarError::InsufficientData {
            needed: MIN_FIT_LENGTH,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(AmarError::Precondition(
            "series contains non-finite values".into(),
        ));
    }
    let grid = match &options.zeta {
        ThresholdChoice::Fixed(z) => vec![*z],
        ThresholdChoice::Grid(g) => g.clone(),
        ThresholdChoice::Auto => auto_zeta_grid(x.len()),
    };
    match options.p {
        OrderChoice::Fixed(p) => {
            select_threshold(x, p, options.q_max, &grid, options.interval_mode(p))
        }
        OrderChoice::Auto => select_p(x, options.q_max, &grid, options.intervals, options.seed),
    }
}

/// Two-scale model with a fixed short scale whose long scale minimises the
/// training residual sum of squares over `long_candidates`. All candidates
/// are compared on the common rows `t > max(long_candidates)`.
pub fn best_two_scale(
    x: &[f64],
    short: usize,
    long_candidates: std::ops::RangeInclusive<usize>,
) -> Result<ScaleFit> {
    let (lo, hi) = (*long_candidates.start(), *long_candidates.end());
    if lo <= short || hi < lo {
        return Err(AmarError::Precondition(format!(
            "long scales {lo}..={hi} must exceed the short scale {short}"
        )));
    }
    let mut best: Option<ScaleFit> = None;
    for long in lo..=hi {
        let fit = refit_scales_from(x, &[short, long], hi + 1)?;
        if best.as_ref().is_none_or(|b| fit.rss < b.rss) {
            best = Some(fit);
        }
    }
    let chosen = best.expect("nonempty range");
    // Report coefficients estimated on the chosen model's own rows.
    refit_scales(x, &chosen.model.scales)
}
