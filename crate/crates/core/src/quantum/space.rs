use std::sync::Arc;

use crate::error::{Error, Result};

/// Label used for the charge qubit throughout the crate.
pub const QUBIT: &str = "q";
/// Label used for the transmission-line resonator mode.
pub const STLR: &str = "a";
/// Label used for the nanomechanical resonator mode.
pub const NMR: &str = "b";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsystemKind {
    Qubit,
    Boson,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
    pub kind: SubsystemKind,
}

/// Ordered tensor-product layout. The first subsystem is the most
/// significant index (qubit-major for the standard `(q, a, b)` layout).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    subsystems: Arc<[Subsystem]>,
}

impl SpaceDescriptor {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidSpace("no subsystems".into()));
        }
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim < 2 {
                return Err(Error::InvalidDimension { dim: s.dim });
            }
            if s.kind == SubsystemKind::Qubit && s.dim != 2 {
                return Err(Error::InvalidSpace(format!(
                    "qubit `{}` must have dimension 2",
                    s.label
                )));
            }
            if subsystems[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::InvalidSpace(format!("duplicate label `{}`", s.label)));
            }
        }
        Ok(Self {
            subsystems: subsystems.into(),
        })
    }

    pub fn boson(label: &str, dim: usize) -> Result<Self> {
        Self::new(vec![Subsystem {
            label: label.into(),
            dim,
            kind: SubsystemKind::Boson,
        }])
    }

    pub fn qubit(label: &str) -> Self {
        Self::new(vec![Subsystem {
            label: label.into(),
            dim: 2,
            kind: SubsystemKind::Qubit,
        }])
        .expect("qubit space is always valid")
    }

    /// `(q, a, b)`: qubit, resonator with `n_a` levels, mechanical mode with `n_b` levels.
    pub fn qubit_stlr_nmr(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(vec![
            Subsystem {
                label: QUBIT.into(),
                dim: 2,
                kind: SubsystemKind::Qubit,
            },
            Subsystem {
                label: STLR.into(),
                dim: n_a,
                kind: SubsystemKind::Boson,
            },
            Subsystem {
                label: NMR.into(),
                dim: n_b,
                kind: SubsystemKind::Boson,
            },
        ])
    }

    /// `(a, b)` with the qubit traced out.
    pub fn stlr_nmr(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(vec![
            Subsystem {
                label: STLR.into(),
                dim: n_a,
                kind: SubsystemKind::Boson,
            },
            Subsystem {
                label: NMR.into(),
                dim: n_b,
                kind: SubsystemKind::Boson,
            },
        ])
    }

    pub fn nmr(n_b: usize) -> Result<Self> {
        Self::boson(NMR, n_b)
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSlot(label.into()))
    }

    pub fn subsystem(&self, label: &str) -> Result<&Subsystem> {
        Ok(&self.subsystems[self.position(label)?])
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystem(label)?.dim)
    }

    /// Product of the dimensions after slot `pos` (row-major stride).
    pub(crate) fn stride(&self, pos: usize) -> usize {
        self.subsystems[pos + 1..].iter().map(|s| s.dim).product()
    }

    /// Per-subsystem indices of a flat basis index.
    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.subsystems.len()];
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            out[k] = index % s.dim;
            index /= s.dim;
        }
        out
    }

    pub fn flatten(&self, indices: &[usize]) -> usize {
        indices
            .iter()
            .zip(self.subsystems.iter())
            .fold(0, |acc, (&i, s)| acc * s.dim + i)
    }

    /// Same layout with the listed subsystem removed.
    pub fn without(&self, label: &str) -> Result<Self> {
        let pos = self.position(label)?;
        let rest: Vec<Subsystem> = self
            .subsystems
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, s)| s.clone())
            .collect();
        Self::new(rest)
    }
}
