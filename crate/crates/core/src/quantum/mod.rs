//! Truncated Fock-space operator algebra.

pub mod dense;
mod operator;
mod space;
mod sparse;
mod state;

pub use operator::{embed_operator, ladder_ops, lift_operator, number_op, qubit, OperatorMatrix, HERMITIAN_TOL};
pub use space::{SpaceDescriptor, Subsystem, SubsystemKind, NMR, QUBIT, STLR};
pub use sparse::CsrMatrix;
pub use state::{
    coherent_amplitudes, expectation, expectation_and_variance, make_state, LocalState, StateVector, NORM_TOL,
};
pub(crate) use state::{l2_norm, top_decile};
