//! Adaptive multiscale autoregression: model algebra, simulation, scale
//! detection by narrowest-over-threshold, estimation, forecasting, the
//! multivariate extension and a Monte Carlo benchmark harness.

pub mod amvar;
pub mod error;
pub mod estimate;
pub mod evalbench;
pub mod forecast;
mod linalg;
pub mod model;
pub mod not;
pub mod simulate;

pub use amvar::{amvar_fit_given_scales, union_scale_selection, AmvarFit, AmvarModel};
pub use error::{AmarError, Result};
pub use estimate::{
    amar_fit, best_two_scale, fit_ar_ols, refit_scales, sic_score, FitOptions, FitReport,
    IntervalChoice, OrderChoice, ThresholdChoice,
};
pub use evalbench::{
    hausdorff, preset, run_benchmark, BenchConfig, BenchmarkOutput, BenchmarkRow, PresetModel,
};
pub use forecast::{hit_rate, predict_next, rolling_mspe, rolling_predictions, rolling_rmspe};
pub use model::{
    amar_to_ar, ar_to_amar, check_roots, is_stationary_exact, is_stationary_sufficient,
    spectral_density, AmarModel, ArModel, Innovation, InnovationSpec, ScaleModel, TailFamily,
};
pub use not::{not_detect, Interval, IntervalMode, IntervalSet, NotDetector};
pub use simulate::{simulate, simulate_amar, simulate_ar, Simulation};
