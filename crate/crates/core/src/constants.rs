//! Pinned CODATA values (SI).

use std::f64::consts::PI;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Planck constant, J·s.
pub const PLANCK: f64 = 2.0 * PI * HBAR;
/// Superconducting flux quantum h / 2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// Energy convention for Hamiltonians.
///
/// `Physical` keeps ħ explicit in SI so energies are in joules; `Scaled`
/// sets ħ = 1 so energies equal angular frequencies in arbitrary units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Physical,
    Scaled,
}

impl Units {
    pub fn hbar(self) -> f64 {
        match self {
            Units::Physical => HBAR,
            Units::Scaled => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_quantum_value() {
        assert!((FLUX_QUANTUM / 2.067833848e-15 - 1.0).abs() < 1e-9);
    }
}
