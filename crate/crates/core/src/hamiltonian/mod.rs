//! Hamiltonian builders for every level of the model, from the charge-basis
//! circuit Hamiltonian down to the classically pumped squeezer.

mod frohlich;

pub use frohlich::{
    conjugate_by_generator, frohlich_generator, third_order_scaling, verify_frohlich, Conjugation, FrohlichReport,
    FrohlichTerm, ScalingReport,
};

use num_complex::Complex64 as C64;

use crate::device::DerivedCouplings;
use crate::error::{Error, Result};
use crate::quantum::{
    embed_operator, ladder_ops, number_op, qubit, CsrMatrix, OperatorMatrix, SpaceDescriptor, SubsystemKind, NMR,
    QUBIT, STLR,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    /// Charge-basis circuit Hamiltonian biased at `mΦ₀`, second order in `x`.
    Total,
    /// Qubit eigenbasis, rotating-wave approximation.
    Rwa,
    /// Second-order effective Hamiltonian with the qubit kept.
    EffectiveFull,
    /// Effective Hamiltonian with the qubit frozen in its ground state.
    EffectiveGround,
    /// Ground-state effective Hamiltonian without Stark shifts.
    Pdc,
    /// Interaction picture at `δ = 0`: `ħκ(b†²a + a†b²)`.
    BilinearResonant,
    /// Classical pump: `ħκβ(b†²e^{-iφ} + b²e^{iφ})`.
    Parametric,
}

impl HamiltonianKind {
    pub fn acts_on(self) -> &'static [&'static str] {
        match self {
            Self::Total | Self::Rwa | Self::EffectiveFull => &[QUBIT, STLR, NMR],
            Self::EffectiveGround | Self::Pdc | Self::BilinearResonant => &[STLR, NMR],
            Self::Parametric => &[NMR],
        }
    }

    fn check_space(self, space: &SpaceDescriptor) -> Result<()> {
        let labels: Vec<&str> = space.subsystems().iter().map(|s| s.label.as_str()).collect();
        if labels != self.acts_on() {
            return Err(Error::InvalidSpace(format!(
                "{self:?} acts on {:?}, got {labels:?}",
                self.acts_on()
            )));
        }
        for s in space.subsystems() {
            let want = if s.label == QUBIT { SubsystemKind::Qubit } else { SubsystemKind::Boson };
            if s.kind != want {
                return Err(Error::InvalidSpace(format!("subsystem `{}` has the wrong kind", s.label)));
            }
        }
        Ok(())
    }
}

/// An energy operator together with the ħ of its unit system.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub op: OperatorMatrix,
    pub hbar: f64,
    pub kind: Option<HamiltonianKind>,
}

impl Hamiltonian {
    pub fn new(op: OperatorMatrix, hbar: f64) -> Self {
        Self { op, hbar, kind: None }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.op.space()
    }

    /// The operator divided by ħ (angular-frequency units).
    pub fn angular(&self) -> OperatorMatrix {
        self.op.scale_re(1.0 / self.hbar)
    }
}

/// Handy embedded single-mode operators.
pub(crate) struct Ops {
    space: SpaceDescriptor,
}

impl Ops {
    pub(crate) fn new(space: &SpaceDescriptor) -> Self {
        Self { space: space.clone() }
    }

    fn embed(&self, op: &CsrMatrix, slot: &str, herm: bool) -> OperatorMatrix {
        embed_operator(op, slot, &self.space, herm).expect("slot validated by caller")
    }

    pub(crate) fn lower(&self, slot: &str) -> OperatorMatrix {
        let d = self.space.dim_of(slot).expect("slot validated");
        self.embed(&ladder_ops(d).unwrap().0, slot, false)
    }

    pub(crate) fn raise(&self, slot: &str) -> OperatorMatrix {
        let d = self.space.dim_of(slot).expect("slot validated");
        self.embed(&ladder_ops(d).unwrap().1, slot, false)
    }

    pub(crate) fn number(&self, slot: &str) -> OperatorMatrix {
        let d = self.space.dim_of(slot).expect("slot validated");
        self.embed(&number_op(d).unwrap(), slot, true)
    }

    pub(crate) fn sz(&self) -> OperatorMatrix {
        self.embed(&qubit::sigma_z(), QUBIT, true)
    }

    pub(crate) fn sx(&self) -> OperatorMatrix {
        self.embed(&qubit::sigma_x(), QUBIT, true)
    }

    /// `ρ_+ = |1><0|`
    pub(crate) fn rho_plus(&self) -> OperatorMatrix {
        self.embed(&qubit::raise(), QUBIT, false)
    }

    /// `ρ_- = |0><1|`
    pub(crate) fn rho_minus(&self) -> OperatorMatrix {
        self.embed(&qubit::lower(), QUBIT, false)
    }

    pub(crate) fn identity(&self) -> OperatorMatrix {
        OperatorMatrix::identity(&self.space)
    }
}

fn m(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    a.mul(b).expect("same space")
}

fn lin(terms: &[(f64, &OperatorMatrix)], space: &SpaceDescriptor) -> OperatorMatrix {
    terms.iter().fold(OperatorMatrix::zeros(space), |acc, (c, op)| {
        acc.add_scaled(op, C64::new(*c, 0.0)).expect("same space")
    })
}

/// `b†²a + a†b²` on a space containing both modes.
pub(crate) fn conversion_op(o: &Ops) -> OperatorMatrix {
    let (a, ad) = (o.lower(STLR), o.raise(STLR));
    let (b, bd) = (o.lower(NMR), o.raise(NMR));
    let fwd = m(&m(&bd, &bd), &a);
    let back = m(&ad, &m(&b, &b));
    fwd.add(&back).unwrap().with_hermitian_hint(true)
}

fn finish(op: OperatorMatrix, hbar: f64, kind: HamiltonianKind) -> Hamiltonian {
    Hamiltonian {
        op: op.with_hermitian_hint(true),
        hbar,
        kind: Some(kind),
    }
}

/// Charge-basis Hamiltonian at flux bias `mΦ₀`, Josephson energy expanded to
/// second order in the mechanical displacement.
pub fn build_total(c: &DerivedCouplings, space: &SpaceDescriptor) -> Result<Hamiltonian> {
    HamiltonianKind::Total.check_space(space)?;
    let hbar = c.hbar();
    let o = Ops::new(space);
    let x_a = o.lower(STLR).add(&o.raise(STLR))?;
    let x_b = o.lower(NMR).add(&o.raise(NMR))?;
    let x_b2 = m(&x_b, &x_b);
    let sz = o.sz();
    let sx = o.sx();
    let op = lin(
        &[
            (hbar * c.omega_a, &o.number(STLR)),
            (hbar * c.omega_b, &o.number(NMR)),
            (-0.5 * c.ec_bias, &sz),
            (-c.ej_signed, &sx),
            (hbar * c.lambda_a, &m(&x_a, &sz)),
            (hbar * c.lambda_b, &m(&x_b2, &sx)),
        ],
        space,
    );
    Ok(finish(op, hbar, HamiltonianKind::Total))
}

/// Qubit-eigenbasis Hamiltonian under the rotating-wave approximation.
/// Only the five retained terms are constructed.
pub fn build_rwa(c: &DerivedCouplings, space: &SpaceDescriptor) -> Result<Hamiltonian> {
    HamiltonianKind::Rwa.check_space(space)?;
    let hbar = c.hbar();
    let o = Ops::new(space);
    let (a, ad) = (o.lower(STLR), o.raise(STLR));
    let (b, bd) = (o.lower(NMR), o.raise(NMR));
    let (rp, rm) = (o.rho_plus(), o.rho_minus());
    let g_a_term = m(&ad, &rm).add(&m(&a, &rp))?;
    let g_b_term = m(&m(&bd, &bd), &rm).add(&m(&m(&b, &b), &rp))?;
    let op = lin(
        &[
            (hbar * c.omega_a, &o.number(STLR)),
            (hbar * c.omega_b, &o.number(NMR)),
            (-0.5 * hbar * c.omega, &o.sz()),
            (hbar * c.g_a, &g_a_term),
            (hbar * c.g_b, &g_b_term),
        ],
        space,
    );
    Ok(finish(op, hbar, HamiltonianKind::Rwa))
}

/// Closed-form second-order effective Hamiltonians.
pub fn build_effective(c: &DerivedCouplings, space: &SpaceDescriptor, kind: HamiltonianKind) -> Result<Hamiltonian> {
    let hbar = c.hbar();
    let sa = c.g_a * c.g_a / c.delta_a;
    let sb = c.g_b * c.g_b / c.delta_b;
    let conv = -0.5 * c.g_a * c.g_b * (1.0 / c.delta_a + 1.0 / c.delta_b);
    match kind {
        HamiltonianKind::EffectiveFull => {
            kind.check_space(space)?;
            let o = Ops::new(space);
            let rz = o.sz();
            let na = o.number(STLR);
            let nb = o.number(NMR);
            let op = lin(
                &[
                    (hbar * c.omega_a, &na),
                    (-hbar * sa, &m(&rz, &na)),
                    (-0.5 * hbar * (c.omega + 2.0 * sb + sa), &rz),
                    (hbar * (c.omega_b + 2.0 * sb), &nb),
                    (-hbar * sb, &m(&rz, &nb)),
                    (-hbar * sb, &m(&rz, &m(&nb, &nb))),
                    (hbar * conv, &m(&conversion_op(&o), &rz)),
                ],
                space,
            );
            Ok(finish(op, hbar, kind))
        }
        HamiltonianKind::EffectiveGround => {
            kind.check_space(space)?;
            let o = Ops::new(space);
            let nb = o.number(NMR);
            let op = lin(
                &[
                    (hbar * (c.omega_a - sa), &o.number(STLR)),
                    (hbar * (c.omega_b + sb), &nb),
                    (-hbar * sb, &m(&nb, &nb)),
                    (hbar * conv, &conversion_op(&o)),
                ],
                space,
            );
            Ok(finish(op, hbar, kind))
        }
        HamiltonianKind::Pdc => {
            kind.check_space(space)?;
            let o = Ops::new(space);
            let op = lin(
                &[
                    (hbar * c.omega_a, &o.number(STLR)),
                    (hbar * c.omega_b, &o.number(NMR)),
                    (hbar * conv, &conversion_op(&o)),
                ],
                space,
            );
            Ok(finish(op, hbar, kind))
        }
        other => Err(Error::InvalidSpace(format!("{other:?} is not an effective Hamiltonian kind"))),
    }
}

/// `M = 2n_a + n_b + 2q` on `(qubit, STLR, NMR)`, with `q = 1` for the
/// excited qubit state. The RWA Hamiltonian conserves it.
pub fn excitation_operator(space: &SpaceDescriptor) -> Result<OperatorMatrix> {
    HamiltonianKind::Rwa.check_space(space)?;
    let diag: Vec<C64> = (0..space.total_dim())
        .map(|i| {
            let k = space.unflatten(i);
            C64::new((2 * k[0] + 2 * k[1] + k[2]) as f64, 0.0)
        })
        .collect();
    OperatorMatrix::new(space.clone(), CsrMatrix::diagonal(&diag), true)
}

/// Resonant interaction-picture coupling `ħκ(b†²a + a†b²)`.
pub fn build_bilinear(kappa: f64, hbar: f64, space: &SpaceDescriptor) -> Result<Hamiltonian> {
    HamiltonianKind::BilinearResonant.check_space(space)?;
    let o = Ops::new(space);
    let op = conversion_op(&o).scale_re(hbar * kappa);
    Ok(finish(op, hbar, HamiltonianKind::BilinearResonant))
}

/// Classically pumped squeezer `ħκβ(b†²e^{-iφ} + b²e^{iφ})`.
pub fn build_parametric(kappa: f64, beta: f64, phi: f64, hbar: f64, space_b: &SpaceDescriptor) -> Result<Hamiltonian> {
    HamiltonianKind::Parametric.check_space(space_b)?;
    let o = Ops::new(space_b);
    let (b, bd) = (o.lower(NMR), o.raise(NMR));
    let amp = hbar * kappa * beta;
    let op = m(&bd, &bd)
        .scale(C64::from_polar(amp, -phi))
        .add(&m(&b, &b).scale(C64::from_polar(amp, phi)))?;
    Ok(finish(op, hbar, HamiltonianKind::Parametric))
}
