//! Numerical model of a Cooper-pair box that couples a transmission-line
//! resonator to a nanomechanical resonator. Covers the device couplings,
//! the second-order Fröhlich elimination of the qubit, and squeezing of the
//! mechanical mode with and without drive phase noise.

pub mod constants;
pub mod device;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod quantum;
pub mod squeezing;
pub mod table;

pub use constants::Units;
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
