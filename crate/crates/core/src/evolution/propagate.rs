use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::krylov::expmv_hermitian;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::quantum::dense::HermitianEigen;
use crate::quantum::{l2_norm, CsrMatrix, SpaceDescriptor, StateVector, HERMITIAN_TOL};

/// Largest dimension propagated by dense eigendecomposition under
/// [`Backend::Auto`].
pub const DENSE_MAX_DIM: usize = 2000;
/// Norm drift that aborts a propagation.
pub const NORM_DRIFT_TOL: f64 = 1e-8;
/// Top-decile population that aborts a propagation.
pub const LEAKAGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone)]
enum Engine {
    Dense(HermitianEigen),
    Krylov(CsrMatrix),
}

/// `e^{-iHt/ħ}` for a fixed Hamiltonian, with the dense factorization cached.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: SpaceDescriptor,
    engine: Engine,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        Self::with_backend(h, Backend::Auto)
    }

    pub fn with_backend(h: &Hamiltonian, backend: Backend) -> Result<Self> {
        if !h.op.is_hermitian_hint() || h.op.relative_hermiticity_residual() > HERMITIAN_TOL {
            return Err(Error::NotHermitian);
        }
        if !(h.hbar > 0.0) {
            return Err(Error::InvalidParameter {
                field: "hbar".into(),
                reason: "must be > 0".into(),
            });
        }
        let angular = h.angular();
        let dense = match backend {
            Backend::Auto => angular.dim() <= DENSE_MAX_DIM,
            Backend::Dense => true,
            Backend::Krylov => false,
        };
        let engine = if dense {
            Engine::Dense(HermitianEigen::new(&angular.to_dense())?)
        } else {
            Engine::Krylov(angular.matrix().clone())
        };
        Ok(Self {
            space: h.space().clone(),
            engine,
        })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.engine, Engine::Dense(_))
    }

    /// Applies `e^{-iHt/ħ}` with no accuracy or leakage checks.
    pub fn apply_raw(&self, v: &[C64], t: f64) -> Vec<C64> {
        match &self.engine {
            Engine::Dense(eig) => {
                let v = DVector::from_column_slice(v);
                eig.apply(&v, |l| C64::new(0.0, -l * t).exp()).as_slice().to_vec()
            }
            Engine::Krylov(h) => expmv_hermitian(h, v, t),
        }
    }

    /// Applies `e^{-iHt/ħ}` and enforces the norm-drift and leakage guards;
    /// `time` labels a leakage error.
    pub fn evolve_at(&self, state: &StateVector, t: f64, time: f64) -> Result<StateVector> {
        if state.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let out = self.apply_raw(state.amplitudes(), t);
        let drift = (l2_norm(&out) - 1.0).abs();
        if !(drift <= NORM_DRIFT_TOL) {
            return Err(Error::PropagationAccuracy { drift });
        }
        let out = StateVector::from_normalized(&self.space, out, NORM_DRIFT_TOL)?;
        check_leakage(&out, time)?;
        Ok(out)
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        self.evolve_at(state, t, t)
    }
}

pub(crate) fn check_leakage(state: &StateVector, time: f64) -> Result<()> {
    let (subsystem, leakage) = state.max_leakage();
    if leakage > LEAKAGE_TOL {
        return Err(Error::Leakage {
            subsystem,
            leakage,
            time,
        });
    }
    Ok(())
}

/// `|ψ(t)⟩ = e^{-iHt/ħ}|ψ₀⟩`.
pub fn propagate(h: &Hamiltonian, state0: &StateVector, t: f64) -> Result<StateVector> {
    if h.space() != state0.space() {
        return Err(Error::SpaceMismatch);
    }
    Propagator::new(h)?.evolve(state0, t)
}
