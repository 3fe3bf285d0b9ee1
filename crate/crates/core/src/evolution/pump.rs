use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::propagate::Propagator;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_bilinear, build_parametric};
use crate::quantum::{
    embed_operator, expectation, expectation_and_variance, ladder_ops, make_state, number_op, LocalState,
    OperatorMatrix, SpaceDescriptor, NMR, STLR,
};

/// NMR quadrature widths under a quantized pump and under its classical
/// replacement, at one value of `ξ = 2κβt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpPoint {
    pub xi: f64,
    pub t: f64,
    pub dx_quantum: f64,
    pub dp_quantum: f64,
    pub dx_classical: f64,
    pub dp_classical: f64,
    /// `|Δx_quantum / Δx_classical − 1|`
    pub rel_dx: f64,
    pub rel_dp: f64,
    /// `1 − ⟨a†a⟩ / β²`
    pub depletion: f64,
    pub leakage: f64,
}

fn widths(x: &OperatorMatrix, p: &OperatorMatrix, s: &crate::quantum::StateVector) -> Result<(f64, f64)> {
    Ok((expectation_and_variance(x, s)?.1.sqrt(), expectation_and_variance(p, s)?.1.sqrt()))
}

fn quadrature_ops(space: &SpaceDescriptor) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (lo, hi) = ladder_ops(space.dim_of(NMR)?)?;
    let b = embed_operator(&lo, NMR, space, false)?;
    let bd = embed_operator(&hi, NMR, space, false)?;
    let x = b.add(&bd)?.with_hermitian_hint(true);
    let p = bd.sub(&b)?.scale(C64::new(0.0, 1.0)).with_hermitian_hint(true);
    Ok((x, p))
}

/// Evolves `ħκ(b†²a + a†b²)` from `|α = βe^{-iφ}⟩ ⊗ |0⟩` and
/// `ħκβ(b†²e^{-iφ} + b²e^{iφ})` from `|0⟩`, sampling both at the times
/// where `2κβt` reaches each entry of `xis` (ascending).
pub fn pump_depletion_check(kappa: f64, beta: f64, phi: f64, n_a: usize, n_b: usize, xis: &[f64]) -> Result<Vec<PumpPoint>> {
    if !(kappa != 0.0 && beta > 0.0) {
        return Err(Error::InvalidParameter {
            field: "beta".into(),
            reason: "needs kappa != 0 and beta > 0".into(),
        });
    }
    if xis.windows(2).any(|w| w[1] < w[0]) || xis.first().is_some_and(|&x| x < 0.0) {
        return Err(Error::InvalidParameter {
            field: "xi".into(),
            reason: "must be ascending and non-negative".into(),
        });
    }
    let joint = SpaceDescriptor::stlr_nmr(n_a, n_b)?;
    let single = SpaceDescriptor::nmr(n_b)?;
    let quantum = Propagator::new(&build_bilinear(kappa, 1.0, &joint)?)?;
    let classical = Propagator::new(&build_parametric(kappa, beta, phi, 1.0, &single)?)?;
    let alpha = C64::from_polar(beta, -phi);
    let mut psi = make_state(&joint, &[LocalState::Coherent(alpha), LocalState::Number(0)])?;
    let mut chi = make_state(&single, &[LocalState::Number(0)])?;
    let (xq, pq) = quadrature_ops(&joint)?;
    let (xc, pc) = quadrature_ops(&single)?;
    let na = embed_operator(&number_op(n_a)?, STLR, &joint, true)?;

    let mut out = Vec::with_capacity(xis.len());
    let mut t_prev = 0.0;
    for &xi in xis {
        let t = xi / (2.0 * kappa.abs() * beta);
        psi = quantum.evolve_at(&psi, t - t_prev, t)?;
        chi = classical.evolve_at(&chi, t - t_prev, t)?;
        t_prev = t;
        let (dxq, dpq) = widths(&xq, &pq, &psi)?;
        let (dxc, dpc) = widths(&xc, &pc, &chi)?;
        out.push(PumpPoint {
            xi,
            t,
            dx_quantum: dxq,
            dp_quantum: dpq,
            dx_classical: dxc,
            dp_classical: dpc,
            rel_dx: (dxq / dxc - 1.0).abs(),
            rel_dp: (dpq / dpc - 1.0).abs(),
            depletion: 1.0 - expectation(&na, &psi)?.re / (beta * beta),
            leakage: psi.max_leakage().1,
        });
    }
    Ok(out)
}
