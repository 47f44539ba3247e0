//! Criterion benchmarks for the AMAR estimator live under `benches/`.

pub use amar_core;
