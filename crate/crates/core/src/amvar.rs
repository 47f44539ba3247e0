//! Multivariate extension: each timescale carries a `d×d` coefficient matrix
//! applied to the vector of per-component running means.
//!
//! Series are passed as one `Vec<f64>` per component, all of equal length.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{AmarError, Result};
use crate::estimate::{amar_fit, FitOptions};
use crate::linalg::{least_squares, most_collinear_with};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmvarModel {
    pub scales: Vec<usize>,
    /// `coeff_mats[k][i][c]`: effect of the scale-`k` running mean of
    /// component `c` on component `i`.
    pub coeff_mats: Vec<Vec<Vec<f64>>>,
    pub d: usize,
}

impl AmvarModel {
    pub fn new(scales: Vec<usize>, coeff_mats: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let d = coeff_mats.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(AmarError::InvalidModel(
                "AMVAR needs at least one coefficient matrix".into(),
            ));
        }
        if coeff_mats.len() != scales.len() {
            return Err(AmarError::InvalidModel(format!(
                "{} scales but {} coefficient matrices",
                scales.len(),
                coeff_mats.len()
            )));
        }
        if coeff_mats
            .iter()
            .any(|m| m.len() != d || m.iter().any(|row| row.len() != d))
        {
            return Err(AmarError::InvalidModel(format!(
                "all coefficient matrices must be {d}x{d}"
            )));
        }
        if scales.first() == Some(&0) || scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AmarError::InvalidModel(format!(
                "timescales must be strictly increasing and >= 1, got {scales:?}"
            )));
        }
        Ok(Self {
            scales,
            coeff_mats,
            d,
        })
    }

    pub fn max_scale(&self) -> usize {
        self.scales.last().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmvarFit {
    pub model: AmvarModel,
    /// Residual covariance `EᵀE / n` over the estimation rows.
    pub residual_cov: Vec<Vec<f64>>,
}

fn check_components(x: &[Vec<f64>]) -> Result<usize> {
    let t = x.first().map_or(0, Vec::len);
    if x.is_empty() || x.iter().any(|c| c.len() != t) {
        return Err(AmarError::Precondition(
            "components must be nonempty and of equal length".into(),
        ));
    }
    Ok(t)
}

/// Equation-by-equation OLS on the `d·q` running-mean regressors, rows
/// `t = τ_q+1..=T`. Also accepts `d = 1`, where it coincides with the
/// univariate scale refit.
pub fn amvar_fit_given_scales(x: &[Vec<f64>], scales: &[usize]) -> Result<AmvarFit> {
    let t = check_components(x)?;
    let d = x.len();
    let q = scales.len();
    if q == 0 {
        return Err(AmarError::Precondition(
            "at least one timescale is required".into(),
        ));
    }
    if scales[0] == 0 || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AmarError::InvalidModel(format!(
            "timescales must be strictly increasing and >= 1, got {scales:?}"
        )));
    }
    let max = scales[q - 1];
    if t <= 2 * d * q + max {
        return Err(AmarError::InsufficientData {
            needed: 2 * d * q + max + 1,
            got: t,
        });
    }
    let prefix: Vec<Vec<f64>> = x
        .iter()
        .map(|c| {
            std::iter::once(0.0)
                .chain(c.iter().scan(0.0, |acc, v| {
                    *acc += v;
                    Some(*acc)
                }))
                .collect()
        })
        .collect();
    let n = t - max;
    let design = DMatrix::from_fn(n, d * q, |r, col| {
        let (k, c) = (col / d, col % d);
        let i = max + r;
        (prefix[c][i] - prefix[c][i - scales[k]]) / scales[k] as f64
    });

    let mut coeff_mats = vec![vec![vec![0.0; d]; d]; q];
    let mut residuals = DMatrix::<f64>::zeros(n, d);
    for eq in 0..d {
        let y = DVector::from_column_slice(&x[eq][max..]);
        let sol = least_squares(design.clone(), &y).map_err(|e| {
            let other = most_collinear_with(&design, e.column);
            AmarError::SingularDesign(format!(
                "regressor (component {}, scale {}) is collinear with (component {}, scale {})",
                e.column % d,
                scales[e.column / d],
                other % d,
                scales[other / d]
            ))
        })?;
        let coef = DVector::from_vec(sol.coef.clone());
        let fitted = &design * &coef;
        residuals.set_column(eq, &(y - fitted));
        for (col, v) in sol.coef.iter().enumerate() {
            coeff_mats[col / d][eq][col % d] = *v;
        }
    }
    let cov = residuals.transpose() * &residuals / n as f64;
    let residual_cov = (0..d)
        .map(|i| (0..d).map(|j| cov[(i, j)]).collect())
        .collect();
    Ok(AmvarFit {
        model: AmvarModel::new(scales.to_vec(), coeff_mats)?,
        residual_cov,
    })
}

/// Runs the univariate fit on every component and returns the sorted union
/// of the detected timescales.
pub fn union_scale_selection(x: &[Vec<f64>], options: &FitOptions) -> Result<Vec<usize>> {
    check_components(x)?;
    if x.len() < 2 {
        return Err(AmarError::Precondition(
            "scale union needs at least two components".into(),
        ));
    }
    let mut all = Vec::new();
    for c in x {
        all.extend(amar_fit(c, options)?.scales);
    }
    all.sort_unstable();
    all.dedup();
    Ok(all)
}

/// One-step prediction `Σ_k 𝛂_k · m_k`, with `m_k` the vector of scale-`k`
/// running means of the last observations.
pub fn amvar_predict_next(model: &AmvarModel, history: &[Vec<f64>]) -> Result<Vec<f64>> {
    let t = check_components(history)?;
    if history.len() != model.d {
        return Err(AmarError::Precondition(format!(
            "model has {} components, history has {}",
            model.d,
            history.len()
        )));
    }
    if t < model.max_scale() {
        return Err(AmarError::InsufficientHistory {
            needed: model.max_scale(),
            got: t,
        });
    }
    let d = model.d;
    let mut out = vec![0.0; d];
    for (k, &tau) in model.scales.iter().enumerate() {
        let means: Vec<f64> = history
            .iter()
            .map(|c| c[t - tau..].iter().sum::<f64>() / tau as f64)
            .collect();
        for (i, o) in out.iter_mut().enumerate() {
            *o += model.coeff_mats[k][i]
                .iter()
                .zip(&means)
                .map(|(a, m)| a * m)
                .sum::<f64>();
        }
    }
    Ok(out)
}

/// Rolling one-step predictions of every component over the test rows
/// `history_len..T`.
pub fn amvar_rolling_predictions(
    model: &AmvarModel,
    x: &[Vec<f64>],
    history_len: usize,
) -> Result<Vec<Vec<f64>>> {
    let t = check_components(x)?;
    if history_len >= t {
        return Err(AmarError::Precondition("test segment is empty".into()));
    }
    let mut out = vec![Vec::with_capacity(t - history_len); x.len()];
    for row in history_len..t {
        let hist: Vec<Vec<f64>> = x.iter().map(|c| c[..row].to_vec()).collect();
        for (o, v) in out.iter_mut().zip(amvar_predict_next(model, &hist)?) {
            o.push(v);
        }
    }
    Ok(out)
}
