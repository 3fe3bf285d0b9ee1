//! Time evolution: propagators, full-versus-effective comparisons and
//! phase-noise trajectory ensembles.

mod compare;
mod krylov;
mod noise;
mod propagate;
mod pump;

pub use compare::{
    compare_dynamics, conversion_period, dress_state, full_vs_effective, CompareSetup, DeviationReport, Observable,
};
pub use noise::{phase_noise_ensemble, phase_noise_moments_exact, trajectory_seed, EnsembleStats};
pub use pump::{pump_depletion_check, PumpPoint};
pub use propagate::{propagate, Backend, Propagator, DENSE_MAX_DIM, LEAKAGE_TOL, NORM_DRIFT_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NMR_SQUEEZE_THREADS";

/// Drive phase diffusion and Monte Carlo settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Angular linewidth `D`.
    #[serde(rename = "D")]
    pub linewidth: f64,
    /// `c_D` in `⟨Δφ²⟩ = 2 c_D D t`.
    #[serde(default = "one", rename = "c_D")]
    pub diffusion_factor: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "half_pi")]
    pub phi0: f64,
    #[serde(default = "one_traj")]
    pub n_traj: usize,
    pub dt: f64,
    #[serde(default)]
    pub master_seed: u64,
}

fn one() -> f64 {
    1.0
}

fn half_pi() -> f64 {
    std::f64::consts::FRAC_PI_2
}

fn one_traj() -> usize {
    1
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            linewidth: 0.0,
            diffusion_factor: 1.0,
            beta: 1.0,
            phi0: half_pi(),
            n_traj: 1,
            dt: 1e-3,
            master_seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                field: field.into(),
                reason: reason.into(),
            })
        };
        if !(self.linewidth >= 0.0 && self.linewidth.is_finite()) {
            return bad("D", "must be finite and >= 0");
        }
        if !(self.diffusion_factor >= 0.0 && self.diffusion_factor.is_finite()) {
            return bad("c_D", "must be finite and >= 0");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be finite and > 0");
        }
        if self.n_traj == 0 {
            return bad("n_traj", "must be >= 1");
        }
        if !self.beta.is_finite() || !self.phi0.is_finite() {
            return bad("beta", "beta and phi0 must be finite");
        }
        Ok(())
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub(crate) fn run_capped<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match thread_cap() {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}
