//! Tidy CSV tables for external plotting tools.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use amar_core::model::{spectral_density, ArModel};
use amar_core::FitReport;

pub const DEFAULT_SPECTRAL_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRow {
    pub t: String,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffRow {
    pub lag: usize,
    pub beta_hat: f64,
    pub beta_constrained: f64,
    /// 1 when the lag is an estimated timescale.
    pub is_scale_boundary: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRow {
    pub frequency: f64,
    pub density: f64,
}

pub fn path_rows(labels: &[String], values: &[f64]) -> Vec<PathRow> {
    labels
        .iter()
        .zip(values)
        .map(|(t, &x)| PathRow { t: t.clone(), x })
        .collect()
}

/// One row per lag `1..=p` of the chosen order.
pub fn coeff_rows(report: &FitReport) -> Vec<CoeffRow> {
    let hat = report.beta_unconstrained.coeffs();
    let constrained = report.beta_constrained.coeffs();
    let n = hat.len().max(constrained.len());
    (1..=n)
        .map(|lag| CoeffRow {
            lag,
            beta_hat: hat.get(lag - 1).copied().unwrap_or(0.0),
            beta_constrained: constrained.get(lag - 1).copied().unwrap_or(0.0),
            is_scale_boundary: u8::from(report.scales.contains(&lag)),
        })
        .collect()
}

/// Density at the midpoints `(i − ½)/(2n)`, `i = 1..=n`, of `(0, ½)`.
pub fn spectral_rows(beta: &ArModel, points: usize) -> Result<Vec<SpectralRow>> {
    (1..=points)
        .map(|i| {
            let frequency = (i as f64 - 0.5) / (2.0 * points as f64);
            Ok(SpectralRow {
                frequency,
                density: spectral_density(beta, frequency)?,
            })
        })
        .collect()
}

pub fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
