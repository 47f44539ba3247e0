//! Model types and the exact mapping between the multiscale (AMAR) and the
//! dense autoregressive (AR) parameterisations.
//!
//! An AMAR(q) model with timescales `τ₁ < … < τ_q` and coefficients
//! `α₁ … α_q` regresses `X_t` on running means of its own past:
//!
//! ```text
//! X_t = Σ_k α_k (X_{t-1} + … + X_{t-τ_k}) / τ_k + ε_t
//! ```
//!
//! Its AR(p) coefficients (`p ≥ τ_q`) are `β_j = Σ_{k: τ_k ≥ j} α_k / τ_k`,
//! piecewise constant in `j` with jumps exactly at the timescales.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{AmarError, Result};

/// Relative tolerance used when deciding whether two adjacent AR
/// coefficients belong to the same constant run.
pub const RUN_TOLERANCE: f64 = 1e-9;

/// Family of a symmetric regularly varying innovation law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFamily {
    /// `P(|Z| > z) = z^{-index}` for `z ≥ 1`, random sign.
    Pareto,
    /// Standard Cauchy; tail index 1.
    Cauchy,
}

/// Innovation distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Innovation {
    Gaussian { sigma: f64 },
    RegularlyVarying { index: f64, family: TailFamily },
}

impl Default for Innovation {
    fn default() -> Self {
        Innovation::Gaussian { sigma: 1.0 }
    }
}

impl Innovation {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Innovation::Gaussian { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(AmarError::InvalidModel(format!(
                        "gaussian sigma must be positive, got {sigma}"
                    )));
                }
            }
            Innovation::RegularlyVarying { index, family } => {
                if !(index > 0.0 && index.is_finite()) || index == 2.0 {
                    return Err(AmarError::InvalidModel(format!(
                        "tail index must be positive and different from 2, got {index}"
                    )));
                }
                if family == TailFamily::Cauchy && index != 1.0 {
                    return Err(AmarError::InvalidModel(format!(
                        "the Cauchy family has tail index 1, got {index}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn cauchy() -> Self {
        Innovation::RegularlyVarying {
            index: 1.0,
            family: TailFamily::Cauchy,
        }
    }

    pub fn pareto(index: f64) -> Self {
        Innovation::RegularlyVarying {
            index,
            family: TailFamily::Pareto,
        }
    }
}

/// An innovation law together with the seed of its random stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationSpec {
    pub kind: Innovation,
    pub seed: u64,
}

impl InnovationSpec {
    pub fn new(kind: Innovation, seed: u64) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, seed })
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Result<Self> {
        Self::new(Innovation::Gaussian { sigma }, seed)
    }
}

/// Timescales and their coefficients, possibly empty.
///
/// This is the estimation-side view of an AMAR model: a fit may legitimately
/// find no timescale at all, in which case the predictor is identically zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScaleModel {
    pub scales: Vec<usize>,
    pub alpha: Vec<f64>,
}

impl ScaleModel {
    pub fn new(scales: Vec<usize>, alpha: Vec<f64>) -> Result<Self> {
        if scales.len() != alpha.len() {
            return Err(AmarError::InvalidModel(format!(
                "{} scales but {} coefficients",
                scales.len(),
                alpha.len()
            )));
        }
        check_scales(&scales)?;
        Ok(Self { scales, alpha })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn q(&self) -> usize {
        self.scales.len()
    }

    pub fn max_scale(&self) -> usize {
        self.scales.last().copied().unwrap_or(0)
    }

    /// Dense AR(p) coefficients implied by the scales; all zero when empty.
    pub fn to_ar_coeffs(&self, p: usize) -> Result<Vec<f64>> {
        if p < self.max_scale() {
            return Err(AmarError::InvalidOrder {
                p,
                max_scale: self.max_scale(),
            });
        }
        Ok(expand_coeffs(&self.scales, &self.alpha, p))
    }
}

fn check_scales(scales: &[usize]) -> Result<()> {
    if scales.first() == Some(&0) {
        return Err(AmarError::InvalidModel("timescales must be >= 1".into()));
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AmarError::InvalidModel(format!(
            "timescales must be strictly increasing, got {scales:?}"
        )));
    }
    Ok(())
}

fn expand_coeffs(scales: &[usize], alpha: &[f64], p: usize) -> Vec<f64> {
    let mut beta = vec![0.0; p];
    let mut acc = 0.0;
    let mut k = scales.len();
    for j in (1..=scales.last().copied().unwrap_or(0)).rev() {
        while k > 0 && scales[k - 1] >= j {
            k -= 1;
            acc += alpha[k] / scales[k] as f64;
        }
        beta[j - 1] = acc;
    }
    beta
}

/// AMAR(q) model: strictly increasing timescales with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAmarModel")]
pub struct AmarModel {
    scales: Vec<usize>,
    coeffs: Vec<f64>,
    innovation: Innovation,
    seed: u64,
}

#[derive(Deserialize)]
struct RawAmarModel {
    scales: Vec<usize>,
    coeffs: Vec<f64>,
    #[serde(default)]
    innovation: Innovation,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<RawAmarModel> for AmarModel {
    type Error = AmarError;

    fn try_from(raw: RawAmarModel) -> Result<Self> {
        AmarModel::with_innovation(raw.scales, raw.coeffs, raw.innovation, raw.seed)
    }
}

impl AmarModel {
    /// Model with standard Gaussian innovations and seed 0.
    pub fn new(scales: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        Self::with_innovation(scales, coeffs, Innovation::default(), 0)
    }

    pub fn with_innovation(
        scales: Vec<usize>,
        coeffs: Vec<f64>,
        innovation: Innovation,
        seed: u64,
    ) -> Result<Self> {
        if scales.is_empty() {
            return Err(AmarError::InvalidModel(
                "an AMAR model needs at least one timescale".into(),
            ));
        }
        if scales.len() != coeffs.len() {
            return Err(AmarError::InvalidModel(format!(
                "{} scales but {} coefficients",
                scales.len(),
                coeffs.len()
            )));
        }
        check_scales(&scales)?;
        if let Some(a) = coeffs.iter().find(|a| **a == 0.0 || !a.is_finite()) {
            return Err(AmarError::InvalidModel(format!(
                "coefficients must be finite and nonzero, got {a}"
            )));
        }
        innovation.validate()?;
        Ok(Self {
            scales,
            coeffs,
            innovation,
            seed,
        })
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn innovation(&self) -> Innovation {
        self.innovation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn innovation_spec(&self) -> InnovationSpec {
        InnovationSpec {
            kind: self.innovation,
            seed: self.seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_noise(mut self, innovation: Innovation) -> Result<Self> {
        innovation.validate()?;
        self.innovation = innovation;
        Ok(self)
    }

    pub fn q(&self) -> usize {
        self.scales.len()
    }

    /// Largest timescale `τ_q`.
    pub fn max_scale(&self) -> usize {
        *self.scales.last().expect("nonempty by construction")
    }

    pub fn scale_model(&self) -> ScaleModel {
        ScaleModel {
            scales: self.scales.clone(),
            alpha: self.coeffs.clone(),
        }
    }
}

/// Dense AR(p) coefficient vector `β₁ … β_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArModel")]
pub struct ArModel {
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawArModel {
    coeffs: Vec<f64>,
}

impl TryFrom<RawArModel> for ArModel {
    type Error = AmarError;

    fn try_from(raw: RawArModel) -> Result<Self> {
        ArModel::new(raw.coeffs)
    }
}

impl ArModel {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(AmarError::InvalidModel("AR order must be >= 1".into()));
        }
        if coeffs.iter().any(|b| !b.is_finite()) {
            return Err(AmarError::InvalidModel(
                "AR coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn p(&self) -> usize {
        self.coeffs.len()
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }
}

/// Maps an AMAR model to its AR(p) representation.
pub fn amar_to_ar(model: &AmarModel, p: usize) -> Result<ArModel> {
    if p < model.max_scale() {
        return Err(AmarError::InvalidOrder {
            p,
            max_scale: model.max_scale(),
        });
    }
    ArModel::new(expand_coeffs(&model.scales, &model.coeffs, p))
}

/// Recovers the unique AMAR model whose AR representation is `beta`.
///
/// Runs of equal coefficients (up to [`RUN_TOLERANCE`] relative to the largest
/// coefficient) become timescales; a trailing zero run is dropped. Resulting
/// models carry default Gaussian innovations.
pub fn ar_to_amar(beta: &ArModel) -> Result<AmarModel> {
    let b = beta.coeffs();
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(AmarError::NotRepresentable(
            "all coefficients are zero, so there is no timescale".into(),
        ));
    }
    let tol = RUN_TOLERANCE * scale;
    let same = |a: f64, c: f64| (a - c).abs() <= tol;

    let mut scales = Vec::new();
    let mut coeffs = Vec::new();
    for j in 0..b.len() {
        let next = b.get(j + 1).copied().unwrap_or(0.0);
        let here = b[j];
        let boundary = if j + 1 == b.len() {
            !same(here, 0.0)
        } else {
            !same(here, next)
        };
        if boundary {
            let tau = j + 1;
            scales.push(tau);
            coeffs.push(tau as f64 * (here - next));
        }
    }
    AmarModel::new(scales, coeffs)
}

/// Characteristic polynomial `b(z) = 1 − Σ β_j z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolynomial {
    /// Coefficients in ascending powers; `coefficients[0] == 1`.
    coefficients: Vec<f64>,
}

impl CharPolynomial {
    pub fn from_ar(beta: &ArModel) -> Self {
        let mut coefficients = Vec::with_capacity(beta.p() + 1);
        coefficients.push(1.0);
        coefficients.extend(beta.coeffs().iter().map(|b| -b));
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

/// Outcome of the root-based stationarity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCheck {
    pub stationary: bool,
    /// Smallest modulus among the roots of `b(z)`; infinite when `b ≡ 1`.
    pub min_root_modulus: f64,
    /// Set when the eigenvalue computation is not trustworthy (very large
    /// order, extreme coefficients or a non-converging Schur iteration).
    pub ill_conditioned: bool,
}

/// Sufficient stationarity condition `Σ|α_j| < 1`; also necessary when all
/// coefficients are non-negative.
pub fn is_stationary_sufficient(model: &AmarModel) -> bool {
    model.coeffs().iter().map(|a| a.abs()).sum::<f64>() < 1.0
}

/// Exact test: every root of `b(z)` has modulus greater than `1 + margin`.
pub fn is_stationary_exact(beta: &ArModel, margin: f64) -> bool {
    check_roots(beta, margin).stationary
}

/// Root test via eigenvalues of the companion matrix of `β`.
///
/// The roots of `b(z)` are the reciprocals of the companion eigenvalues, so
/// the condition becomes `|λ| < 1 / (1 + margin)` for every eigenvalue.
pub fn check_roots(beta: &ArModel, margin: f64) -> RootCheck {
    let b = beta.coeffs();
    let order = b.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
    if order == 0 {
        return RootCheck {
            stationary: true,
            min_root_modulus: f64::INFINITY,
            ill_conditioned: false,
        };
    }
    let max_abs = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut ill = order > 500 || max_abs > 1e8;

    let mut companion = DMatrix::<f64>::zeros(order, order);
    for j in 0..order {
        companion[(0, j)] = b[j];
    }
    for i in 1..order {
        companion[(i, i - 1)] = 1.0;
    }
    let max_eig = match companion.clone().try_schur(1e-14, 10_000) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .fold(0.0_f64, |m, l| m.max(l.norm())),
        None => {
            ill = true;
            companion
                .complex_eigenvalues()
                .iter()
                .fold(0.0_f64, |m, l| m.max(l.norm()))
        }
    };
    let min_root_modulus = if max_eig == 0.0 {
        f64::INFINITY
    } else {
        1.0 / max_eig
    };
    RootCheck {
        stationary: min_root_modulus > 1.0 + margin,
        min_root_modulus,
        ill_conditioned: ill,
    }
}

fn check_frequency(f: f64) -> Result<()> {
    if !(f > -0.5 && f < 0.5) {
        return Err(AmarError::FrequencyDomain(f));
    }
    Ok(())
}

/// Spectral density of a single-scale AMAR process with unit innovation
/// variance, in closed form.
pub fn spectral_density_single_scale(alpha1: f64, tau1: usize, f: f64) -> Result<f64> {
    check_frequency(f)?;
    if tau1 == 0 {
        return Err(AmarError::InvalidModel("timescale must be >= 1".into()));
    }
    if f == 0.0 {
        return Ok((1.0 - alpha1).abs().powi(-2));
    }
    let w = -2.0 * std::f64::consts::PI * f;
    let e1 = Complex64::from_polar(1.0, w);
    let etau = Complex64::from_polar(1.0, w * tau1 as f64);
    let one = Complex64::new(1.0, 0.0);
    let transfer = one - e1 * (one - etau) / (one - e1) * (alpha1 / tau1 as f64);
    Ok(transfer.norm_sqr().recip())
}

/// Spectral density `|b(e^{-2πif})|^{-2}` of an AR process with unit
/// innovation variance.
pub fn spectral_density(beta: &ArModel, f: f64) -> Result<f64> {
    check_frequency(f)?;
    let z = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f);
    Ok(CharPolynomial::from_ar(beta).eval(z).norm_sqr().recip())
}

/// AMAR representation of the seasonal model `(1 − Φ₁B^S)(1 − φ₁B) X_t = ε_t`.
pub fn seasonal_to_amar(phi1: f64, seasonal_phi1: f64, period: usize) -> Result<AmarModel> {
    if phi1 == 0.0 || seasonal_phi1 == 0.0 {
        return Err(AmarError::DegenerateParameter(
            "both phi1 and Phi1 must be nonzero; construct the model directly otherwise".into(),
        ));
    }
    if period == 0 {
        return Err(AmarError::DegenerateParameter(
            "seasonal period must be >= 1".into(),
        ));
    }
    // 1 − φB − ΦB^S + φΦB^{S+1}
    let mut beta = vec![0.0; period + 1];
    beta[0] += phi1;
    beta[period - 1] += seasonal_phi1;
    beta[period] -= phi1 * seasonal_phi1;
    ar_to_amar(&ArModel::new(beta)?)
}
