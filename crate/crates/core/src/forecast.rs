//! One-step-ahead forecasts and their accuracy metrics.

use crate::error::{AmarError, Result};
use crate::model::ScaleModel;

/// Conditional mean of the next observation given `history`.
pub fn predict_next(model: &ScaleModel, history: &[f64]) -> Result<f64> {
    let need = model.max_scale();
    if history.len() < need {
        return Err(AmarError::InsufficientHistory {
            needed: need,
            got: history.len(),
        });
    }
    let n = history.len();
    Ok(model
        .scales
        .iter()
        .zip(&model.alpha)
        .map(|(&tau, &a)| a * history[n - tau..].iter().sum::<f64>() / tau as f64)
        .sum())
}

/// Rolling one-step predictions for every point of `test`, each using the
/// observed past (`history` followed by the earlier test points).
pub fn rolling_predictions(model: &ScaleModel, test: &[f64], history: &[f64]) -> Result<Vec<f64>> {
    if test.is_empty() {
        return Err(AmarError::Precondition("test segment is empty".into()));
    }
    let mut series = Vec::with_capacity(history.len() + test.len());
    series.extend_from_slice(history);
    let mut out = Vec::with_capacity(test.len());
    for &obs in test {
        out.push(predict_next(model, &series)?);
        series.push(obs);
    }
    Ok(out)
}

/// Mean squared one-step prediction error over `test`.
pub fn rolling_mspe(model: &ScaleModel, test: &[f64], history: &[f64]) -> Result<f64> {
    let pred = rolling_predictions(model, test, history)?;
    Ok(mspe(&pred, test))
}

/// Square root of [`rolling_mspe`].
pub fn rolling_rmspe(model: &ScaleModel, test: &[f64], history: &[f64]) -> Result<f64> {
    rolling_mspe(model, test, history).map(f64::sqrt)
}

/// Fraction of one-step predictions whose sign matches the realised sign.
/// A zero counts as correct only when both values are zero.
pub fn hit_rate(model: &ScaleModel, test: &[f64], history: &[f64]) -> Result<f64> {
    let pred = rolling_predictions(model, test, history)?;
    Ok(sign_agreement(&pred, test))
}

pub fn mspe(pred: &[f64], actual: &[f64]) -> f64 {
    pred.iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / actual.len() as f64
}

pub fn sign_agreement(pred: &[f64], actual: &[f64]) -> f64 {
    let hits = pred
        .iter()
        .zip(actual)
        .filter(|(p, a)| sign(**p) == sign(**a))
        .count();
    hits as f64 / actual.len() as f64
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}
