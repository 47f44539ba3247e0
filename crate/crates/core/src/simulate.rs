//! Sample paths of AMAR / AR processes.
//!
//! Random streams come from ChaCha20 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`, so a given seed yields the same path on every
//! platform. Gaussian draws use the ziggurat sampler of `rand_distr`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};

use crate::error::{AmarError, Result};
use crate::model::{check_roots, AmarModel, ArModel, Innovation, InnovationSpec, TailFamily};

/// Path together with the innovations that drove it (burn-in removed).
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub path: Vec<f64>,
    pub innovations: Vec<f64>,
}

/// Default burn-in: `1000 + 10·τ_q`.
pub fn default_burn_in(max_lag: usize) -> usize {
    1000 + 10 * max_lag
}

/// Seed of replication `r` derived from a base seed.
pub fn replication_seed(base: u64, r: u64) -> u64 {
    base ^ r
}

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Draws `n` i.i.d. innovations.
pub fn draw_innovations(spec: &InnovationSpec, n: usize) -> Vec<f64> {
    let mut rng = rng_from_seed(spec.seed);
    draw_from(&spec.kind, n, &mut rng)
}

fn draw_from<R: Rng>(kind: &Innovation, n: usize, rng: &mut R) -> Vec<f64> {
    match *kind {
        Innovation::Gaussian { sigma } => (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut *rng);
                sigma * z
            })
            .collect(),
        Innovation::RegularlyVarying {
            family: TailFamily::Cauchy,
            ..
        } => {
            let dist = Cauchy::new(0.0, 1.0).expect("unit scale");
            (0..n).map(|_| dist.sample(rng)).collect()
        }
        Innovation::RegularlyVarying {
            index,
            family: TailFamily::Pareto,
        } => (0..n)
            .map(|_| {
                // 1 − U lies in (0, 1], so the magnitude is finite and ≥ 1.
                let u: f64 = 1.0 - rng.random::<f64>();
                let magnitude = u.powf(-1.0 / index);
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect(),
    }
}

/// Simulates `t` observations of an AMAR model after `burn_in` discarded
/// steps, starting from a zero state. The model must be stationary.
pub fn simulate(model: &AmarModel, t: usize, burn_in: usize) -> Result<Vec<f64>> {
    simulate_amar(model, t, burn_in, false).map(|s| s.path)
}

/// Like [`simulate`], optionally allowing non-stationary (unit-root) models
/// and returning the innovations as well.
pub fn simulate_amar(
    model: &AmarModel,
    t: usize,
    burn_in: usize,
    allow_nonstationary: bool,
) -> Result<Simulation> {
    let beta = model.scale_model().to_ar_coeffs(model.max_scale())?;
    simulate_ar(
        &beta,
        &model.innovation_spec(),
        t,
        burn_in,
        allow_nonstationary,
    )
}

/// Simulates `X_t = Σ_j β_j X_{t-j} + ε_t`. An empty `beta` yields the
/// innovations themselves.
pub fn simulate_ar(
    beta: &[f64],
    spec: &InnovationSpec,
    t: usize,
    burn_in: usize,
    allow_nonstationary: bool,
) -> Result<Simulation> {
    if t == 0 {
        return Err(AmarError::Precondition("path length must be >= 1".into()));
    }
    spec.kind.validate()?;
    if !allow_nonstationary && !beta.is_empty() {
        let ar = ArModel::new(beta.to_vec())?;
        if !check_roots(&ar, 0.0).stationary {
            return Err(AmarError::NonStationary);
        }
    }
    let total = burn_in + t;
    let eps = draw_innovations(spec, total);
    let p = beta.len();
    let mut x = vec![0.0; total];
    for i in 0..total {
        let lags = p.min(i);
        let mut v = eps[i];
        for j in 0..lags {
            v += beta[j] * x[i - 1 - j];
        }
        if !v.is_finite() {
            return Err(AmarError::ExplosivePath { index: i });
        }
        x[i] = v;
    }
    Ok(Simulation {
        path: x.split_off(burn_in),
        innovations: eps[burn_in..].to_vec(),
    })
}

/// Convenience wrapper for an [`ArModel`].
pub fn simulate_ar_model(
    beta: &ArModel,
    spec: &InnovationSpec,
    t: usize,
    burn_in: usize,
    allow_nonstationary: bool,
) -> Result<Simulation> {
    simulate_ar(beta.coeffs(), spec, t, burn_in, allow_nonstationary)
}
