use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::propagate::Propagator;
use crate::device::DerivedCouplings;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_effective, build_rwa, frohlich_generator, Hamiltonian, HamiltonianKind};
use crate::quantum::dense::expm_anti_hermitian;
use crate::quantum::{
    embed_operator, expectation, lift_operator, make_state, number_op, LocalState, OperatorMatrix, SpaceDescriptor,
    StateVector, NMR, QUBIT, STLR,
};

/// An observable measured in both models: `full` acts on the full space,
/// `effective` on the reduced one.
#[derive(Debug, Clone)]
pub struct Observable {
    pub name: String,
    pub full: OperatorMatrix,
    pub effective: OperatorMatrix,
}

pub struct CompareSetup<'a> {
    pub h_full: &'a Hamiltonian,
    pub h_eff: &'a Hamiltonian,
    pub state_full: &'a StateVector,
    pub state_eff: &'a StateVector,
    pub observables: &'a [Observable],
    pub grid: &'a [f64],
    /// Fröhlich generator `S`; when given, the full state is also measured
    /// in the transformed frame `e^{-S}|ψ⟩`.
    pub generator: Option<&'a OperatorMatrix>,
    /// Small parameter `g/Δ` used for the predicted deviation scale.
    pub coupling_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub times: Vec<f64>,
    pub observables: Vec<String>,
    /// `[observable][time]` expectation values in the full model, lab frame.
    pub full: Vec<Vec<f64>>,
    /// Same, measured after the frame change `e^{-S}`.
    pub full_frame: Option<Vec<Vec<f64>>>,
    pub effective: Vec<Vec<f64>>,
    /// `|full − effective|`
    pub deviation: Vec<Vec<f64>>,
    pub frame_deviation: Option<Vec<Vec<f64>>>,
    pub max_deviation: Vec<f64>,
    pub max_frame_deviation: Option<Vec<f64>>,
    /// `(g/Δ)·max|O_eff|` per observable.
    pub predicted_scale: Vec<f64>,
    /// Smallest qubit ground-state population over the grid (lab frame).
    pub qubit_ground_min: Option<f64>,
    pub qubit_ground: Option<Vec<f64>>,
    pub max_leakage: f64,
}

fn expect_re(op: &OperatorMatrix, s: &StateVector) -> Result<f64> {
    Ok(expectation(op, s)?.re)
}

/// Evolves both models over `grid` (ascending, starting at or after 0) and
/// records observable deviations.
pub fn compare_dynamics(setup: &CompareSetup) -> Result<DeviationReport> {
    let CompareSetup {
        h_full,
        h_eff,
        state_full,
        state_eff,
        observables,
        grid,
        generator,
        coupling_ratio,
    } = *setup;
    if h_full.space() != state_full.space() || h_eff.space() != state_eff.space() {
        return Err(Error::SpaceMismatch);
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter {
            field: "grid".into(),
            reason: "must be ascending and non-negative".into(),
        });
    }
    let frame = match generator {
        Some(s) => {
            if s.space() != h_full.space() {
                return Err(Error::SpaceMismatch);
            }
            // e^{-S} = (e^{S})†
            let u = expm_anti_hermitian(&s.to_dense())?.adjoint();
            Some(OperatorMatrix::from_dense(s.space(), &u, false)?)
        }
        None => None,
    };
    let has_qubit = h_full.space().position(QUBIT).is_ok();
    let p_full = Propagator::new(h_full)?;
    let p_eff = Propagator::new(h_eff)?;

    let k = observables.len();
    let mut full = vec![Vec::with_capacity(grid.len()); k];
    let mut effective = vec![Vec::with_capacity(grid.len()); k];
    let mut full_frame = frame.as_ref().map(|_| vec![Vec::with_capacity(grid.len()); k]);
    let mut ground = has_qubit.then(Vec::new);
    let mut max_leakage: f64 = 0.0;

    let (mut psi, mut phi) = (state_full.clone(), state_eff.clone());
    let mut t_prev = 0.0;
    for &t in grid {
        psi = p_full.evolve_at(&psi, t - t_prev, t)?;
        phi = p_eff.evolve_at(&phi, t - t_prev, t)?;
        t_prev = t;
        max_leakage = max_leakage.max(psi.max_leakage().1).max(phi.max_leakage().1);
        let rotated = match &frame {
            Some(u) => Some(StateVector::from_amplitudes(psi.space(), psi.apply(u)?)?),
            None => None,
        };
        for (j, obs) in observables.iter().enumerate() {
            full[j].push(expect_re(&obs.full, &psi)?);
            effective[j].push(expect_re(&obs.effective, &phi)?);
            if let (Some(ff), Some(r)) = (full_frame.as_mut(), rotated.as_ref()) {
                ff[j].push(expect_re(&obs.full, r)?);
            }
        }
        if let Some(g) = ground.as_mut() {
            g.push(psi.populations(QUBIT)?[0]);
        }
    }

    let dev = |a: &[Vec<f64>]| -> Vec<Vec<f64>> {
        a.iter()
            .zip(&effective)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).collect())
            .collect()
    };
    let row_max = |d: &[Vec<f64>]| -> Vec<f64> { d.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect() };
    let deviation = dev(&full);
    let max_deviation = row_max(&deviation);
    let frame_deviation = full_frame.as_deref().map(dev);
    let max_frame_deviation = frame_deviation.as_deref().map(row_max);
    let predicted_scale = observables
        .iter()
        .map(|o| coupling_ratio.abs() * o.effective.max_abs())
        .collect();
    let qubit_ground_min = ground.as_ref().map(|g| g.iter().copied().fold(1.0, f64::min));

    Ok(DeviationReport {
        times: grid.to_vec(),
        observables: observables.iter().map(|o| o.name.clone()).collect(),
        full,
        full_frame,
        effective,
        deviation,
        frame_deviation,
        max_deviation,
        max_frame_deviation,
        predicted_scale,
        qubit_ground_min,
        qubit_ground: ground,
        max_leakage,
    })
}

/// `e^{S}|ψ⟩`: the bare state dressed by the Fröhlich transformation.
pub fn dress_state(state: &StateVector, generator: &OperatorMatrix) -> Result<StateVector> {
    let u = expm_anti_hermitian(&generator.to_dense())?;
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    let out: Vec<C64> = (u * v).as_slice().to_vec();
    StateVector::from_amplitudes(state.space(), out)
}

/// Time for `|1_a, 0_b⟩ → |0_a, 2_b⟩ → |1_a, 0_b⟩` under the bare
/// conversion term, `π / (√2 |κ|)`.
pub fn conversion_period(c: &DerivedCouplings) -> f64 {
    std::f64::consts::PI / (std::f64::consts::SQRT_2 * c.kappa.abs())
}

/// RWA model against an effective model on `STLR ⊗ NMR`, starting from
/// `|0_q, n_a, n_b⟩` dressed by the Fröhlich transformation. Observables
/// are `n_b` and `n_a`, in that order.
pub fn full_vs_effective(
    c: &DerivedCouplings,
    n_a: usize,
    n_b: usize,
    init: (usize, usize),
    kind: HamiltonianKind,
    grid: &[f64],
) -> Result<DeviationReport> {
    let full = SpaceDescriptor::qubit_stlr_nmr(n_a, n_b)?;
    let eff = SpaceDescriptor::stlr_nmr(n_a, n_b)?;
    let h_full = build_rwa(c, &full)?;
    let h_eff = build_effective(c, &eff, kind)?;
    let nb = embed_operator(&number_op(n_b)?, NMR, &eff, true)?;
    let na = embed_operator(&number_op(n_a)?, STLR, &eff, true)?;
    let observables = [
        Observable {
            name: "n_b".into(),
            full: lift_operator(&nb, &full)?,
            effective: nb,
        },
        Observable {
            name: "n_a".into(),
            full: lift_operator(&na, &full)?,
            effective: na,
        },
    ];
    let gen = frohlich_generator(c, &full)?;
    let bare = make_state(&full, &[LocalState::Basis(0), LocalState::Number(init.0), LocalState::Number(init.1)])?;
    let state_full = dress_state(&bare, &gen)?;
    let state_eff = make_state(&eff, &[LocalState::Number(init.0), LocalState::Number(init.1)])?;
    let ratio = (c.g_a / c.delta_a).abs().max((c.g_b / c.delta_b).abs());
    compare_dynamics(&CompareSetup {
        h_full: &h_full,
        h_eff: &h_eff,
        state_full: &state_full,
        state_eff: &state_eff,
        observables: &observables,
        grid,
        generator: Some(&gen),
        coupling_ratio: ratio,
    })
}
