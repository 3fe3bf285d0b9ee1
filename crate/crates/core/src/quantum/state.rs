use num_complex::Complex64 as C64;

use super::operator::OperatorMatrix;
use super::space::{SpaceDescriptor, SubsystemKind};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;

/// Normalized dense amplitude vector on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceDescriptor,
    amplitudes: Vec<C64>,
}

/// Per-subsystem factor of a product state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalState {
    Number(usize),
    Coherent(C64),
    /// Qubit basis index (0 or 1).
    Basis(usize),
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on a zero vector.
    pub fn from_amplitudes(space: &SpaceDescriptor, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("state vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            space: space.clone(),
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Wraps amplitudes without renormalizing. Fails if the norm is off by more than `tol`.
    pub fn from_normalized(space: &SpaceDescriptor, amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                got: amplitudes.len(),
            });
        }
        let drift = (l2_norm(&amplitudes) - 1.0).abs();
        if drift > tol {
            return Err(Error::PropagationAccuracy { drift });
        }
        Ok(Self {
            space: space.clone(),
            amplitudes,
        })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<Vec<C64>> {
        if op.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(op.apply(&self.amplitudes))
    }

    /// Marginal occupation probabilities of one subsystem.
    pub fn populations(&self, label: &str) -> Result<Vec<f64>> {
        let pos = self.space.position(label)?;
        let d = self.space.subsystems()[pos].dim;
        let stride = self.space.stride(pos);
        let mut p = vec![0.0; d];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[(i / stride) % d] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Population in the top tenth of Fock levels of one subsystem
    /// (at least one level).
    pub fn leakage(&self, label: &str) -> Result<f64> {
        let p = self.populations(label)?;
        Ok(top_decile(&p))
    }

    /// Largest leakage over all bosonic subsystems, with the subsystem label.
    pub fn max_leakage(&self) -> (String, f64) {
        self.space
            .subsystems()
            .iter()
            .filter(|s| s.kind == SubsystemKind::Boson)
            .map(|s| (s.label.clone(), self.leakage(&s.label).unwrap_or(0.0)))
            .fold((String::new(), 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }
}

pub(crate) fn top_decile(p: &[f64]) -> f64 {
    let d = p.len();
    let k = d.div_ceil(10).max(1);
    p[d - k..].iter().sum()
}

pub(crate) fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Truncated coherent-state amplitudes `e^{-|α|²/2} αⁿ/√n!`, renormalized.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(dim);
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        out.push(term);
    }
    let norm = l2_norm(&out);
    out.into_iter().map(|z| z / norm).collect()
}

/// Product state with one [`LocalState`] per subsystem, in space order.
pub fn make_state(space: &SpaceDescriptor, spec: &[LocalState]) -> Result<StateVector> {
    let subs = space.subsystems();
    if spec.len() != subs.len() {
        return Err(Error::DimensionMismatch {
            expected: subs.len(),
            got: spec.len(),
        });
    }
    let mut factors = Vec::with_capacity(subs.len());
    for (s, local) in subs.iter().zip(spec) {
        let mut f = vec![C64::new(0.0, 0.0); s.dim];
        match *local {
            LocalState::Number(n) | LocalState::Basis(n) => {
                if n >= s.dim {
                    return Err(Error::TruncationTooSmall {
                        subsystem: s.label.clone(),
                        detail: format!("level {n} outside {} levels", s.dim),
                    });
                }
                if matches!(local, LocalState::Basis(_)) != (s.kind == SubsystemKind::Qubit) {
                    return Err(Error::InvalidSpace(format!(
                        "state kind does not match subsystem `{}`",
                        s.label
                    )));
                }
                f[n] = C64::new(1.0, 0.0);
            }
            LocalState::Coherent(alpha) => {
                if s.kind != SubsystemKind::Boson {
                    return Err(Error::InvalidSpace(format!(
                        "coherent state on qubit `{}`",
                        s.label
                    )));
                }
                if alpha.norm_sqr() > s.dim as f64 / 4.0 {
                    return Err(Error::TruncationTooSmall {
                        subsystem: s.label.clone(),
                        detail: format!(
                            "|alpha|^2 = {} exceeds dim/4 = {}; use dim >= {}",
                            alpha.norm_sqr(),
                            s.dim as f64 / 4.0,
                            (4.0 * alpha.norm_sqr()).ceil()
                        ),
                    });
                }
                f = coherent_amplitudes(alpha, s.dim);
            }
        }
        factors.push(f);
    }
    let amps = factors.iter().fold(vec![C64::new(1.0, 0.0)], |acc, f| {
        acc.iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect()
    });
    StateVector::from_amplitudes(space, amps)
}

/// Returns `(⟨A⟩, ⟨A²⟩ − ⟨A⟩²)`. The variance is only defined for operators
/// carrying the Hermitian hint; small negative round-off is clamped to zero.
pub fn expectation_and_variance(op: &OperatorMatrix, state: &StateVector) -> Result<(C64, f64)> {
    if !op.is_hermitian_hint() {
        return Err(Error::NotHermitian);
    }
    let a_psi = state.apply(op)?;
    let mean: C64 = state
        .amplitudes()
        .iter()
        .zip(&a_psi)
        .map(|(s, x)| s.conj() * x)
        .sum();
    // ⟨A²⟩ = ‖Aψ‖² for Hermitian A
    let second = l2_norm(&a_psi).powi(2);
    let mut var = second - mean.re * mean.re;
    if var < 0.0 && var >= -1e-12 * second.max(1.0) {
        var = 0.0;
    }
    Ok((mean, var))
}

pub fn expectation(op: &OperatorMatrix, state: &StateVector) -> Result<C64> {
    let a_psi = state.apply(op)?;
    Ok(state
        .amplitudes()
        .iter()
        .zip(&a_psi)
        .map(|(s, x)| s.conj() * x)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::operator::{embed_operator, number_op, qubit};

    #[test]
    fn vacuum_and_zero_coherent() {
        let s = SpaceDescriptor::nmr(10).unwrap();
        let vac = make_state(&s, &[LocalState::Number(0)]).unwrap();
        assert_eq!(vac.amplitudes()[0], C64::new(1.0, 0.0));
        let c0 = make_state(&s, &[LocalState::Coherent(C64::new(0.0, 0.0))]).unwrap();
        assert!(c0.fidelity(&vac).unwrap() > 1.0 - 1e-15);
    }

    #[test]
    fn coherent_occupation_and_variance() {
        let s = SpaceDescriptor::nmr(40).unwrap();
        let st = make_state(&s, &[LocalState::Coherent(C64::new(2.0, 0.0))]).unwrap();
        let n = embed_operator(&number_op(40).unwrap(), "b", &s, true).unwrap();
        let (mean, var) = expectation_and_variance(&n, &st).unwrap();
        assert!((mean.re - 4.0).abs() < 1e-6);
        assert!((var - 4.0).abs() < 1e-6);
    }

    #[test]
    fn number_on_vacuum() {
        let s = SpaceDescriptor::nmr(10).unwrap();
        let vac = make_state(&s, &[LocalState::Number(0)]).unwrap();
        let n = embed_operator(&number_op(10).unwrap(), "b", &s, true).unwrap();
        let (mean, var) = expectation_and_variance(&n, &vac).unwrap();
        assert_eq!(mean, C64::new(0.0, 0.0));
        assert_eq!(var, 0.0);
    }

    #[test]
    fn sigma_z_on_plus() {
        let s = SpaceDescriptor::qubit("q");
        let h = 1.0 / 2f64.sqrt();
        let plus = StateVector::from_amplitudes(&s, vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let z = embed_operator(&qubit::sigma_z(), "q", &s, true).unwrap();
        let (mean, var) = expectation_and_variance(&z, &plus).unwrap();
        assert!(mean.norm() < 1e-15);
        assert!((var - 1.0).abs() < 1e-15);
    }

    #[test]
    fn leakage_guard_names_subsystem() {
        let s = SpaceDescriptor::nmr(8).unwrap();
        match make_state(&s, &[LocalState::Coherent(C64::new(2.0, 0.0))]) {
            Err(Error::TruncationTooSmall { subsystem, .. }) => assert_eq!(subsystem, "b"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(make_state(&s, &[LocalState::Number(8)]).is_err());
    }

    #[test]
    fn variance_requires_hermitian_hint() {
        let s = SpaceDescriptor::nmr(4).unwrap();
        let vac = make_state(&s, &[LocalState::Number(0)]).unwrap();
        let (lower, _) = crate::quantum::ladder_ops(4).unwrap();
        let b = embed_operator(&lower, "b", &s, false).unwrap();
        assert!(matches!(expectation_and_variance(&b, &vac), Err(Error::NotHermitian)));
    }

    #[test]
    fn space_mismatch_is_reported() {
        let s4 = SpaceDescriptor::nmr(4).unwrap();
        let s5 = SpaceDescriptor::nmr(5).unwrap();
        let vac = make_state(&s4, &[LocalState::Number(0)]).unwrap();
        let n = embed_operator(&number_op(5).unwrap(), "b", &s5, true).unwrap();
        assert!(matches!(expectation_and_variance(&n, &vac), Err(Error::SpaceMismatch)));
    }
}
