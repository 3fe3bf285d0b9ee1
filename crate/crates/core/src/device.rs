//! Device parameters, derived couplings and regime checks.
//!
//! Sign conventions: the charge basis orders `|N>` before `|N+1>` with
//! `σ_z|N> = +|N>`, and the mixing angle is
//! `θ = atan2((-1)^m 2E_J, E_c(1 - 2n_g))`, taken on the full circle so that
//! it stays continuous when approaching `n_g = 1/2` from either side.
//!
//! With the elementary charge taken positive, `κ > 0` for `n_g < 1/2` and
//! `κ < 0` for `n_g > 1/2`. Only the relative sign between the two sides of
//! the charge degeneracy point carries physical meaning: it selects which
//! quadrature is squeezed for a given drive phase.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{Units, ELEMENTARY_CHARGE, FLUX_QUANTUM, HBAR, PLANCK};
use crate::error::{Error, Result};
use crate::evolution::NoiseModel;

/// Raw circuit parameters. Field names match the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    /// Josephson energy over h (Hz).
    #[serde(rename = "EJ_over_h")]
    pub ej_over_h: f64,
    /// Qubit splitting Ω/2π (Hz). Mutually exclusive with `Ec_over_h`.
    #[serde(rename = "Omega_over_2pi", default, skip_serializing_if = "Option::is_none")]
    pub omega_over_2pi: Option<f64>,
    /// Charging energy over h (Hz).
    #[serde(rename = "Ec_over_h", default, skip_serializing_if = "Option::is_none")]
    pub ec_over_h: Option<f64>,
    pub n_g: f64,
    /// Flux bias index, Φ_e⁰ = mΦ₀.
    pub m: i64,
    #[serde(rename = "Cg_over_CSigma")]
    pub cg_over_csigma: f64,
    /// Resonator antinode voltage amplitude (V).
    #[serde(rename = "V0")]
    pub v0: f64,
    /// Magnetic field (T).
    #[serde(rename = "B")]
    pub b_field: f64,
    /// SQUID loop width (m).
    #[serde(rename = "W")]
    pub width: f64,
    pub omega_a_over_2pi: f64,
    pub omega_b_over_2pi: f64,
    /// Mechanical zero-point length (m). Mutually exclusive with `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Mechanical mass (kg).
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    /// Coherent pump amplitude.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Coherent pump phase (rad).
    #[serde(default = "default_phi")]
    pub phi: f64,
}

fn default_beta() -> f64 {
    1.0
}

fn default_phi() -> f64 {
    PI / 2.0
}

impl DeviceParams {
    /// Parameter set quoted for present-day circuits, on the `n_g > 1/2` side.
    pub fn reference() -> Self {
        Self {
            ej_over_h: 4e9,
            omega_over_2pi: Some(10e9),
            ec_over_h: None,
            n_g: 0.6,
            m: 0,
            cg_over_csigma: 0.1,
            v0: 2e-6,
            b_field: 0.2,
            width: 1e-6,
            omega_a_over_2pi: 3e9,
            omega_b_over_2pi: 1.5e9,
            x0: Some(1e-12),
            mass: None,
            beta: 1.0,
            phi: PI / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &str, reason: &str) -> Error {
            Error::InvalidParameter {
                field: field.into(),
                reason: reason.into(),
            }
        }
        let positive = [
            ("EJ_over_h", self.ej_over_h),
            ("omega_a_over_2pi", self.omega_a_over_2pi),
            ("omega_b_over_2pi", self.omega_b_over_2pi),
            ("Cg_over_CSigma", self.cg_over_csigma),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(name, "must be finite and > 0"));
            }
        }
        for (name, v) in [("V0", self.v0), ("B", self.b_field), ("W", self.width), ("beta", self.beta), ("phi", self.phi)] {
            if !v.is_finite() {
                return Err(bad(name, "must be finite"));
            }
        }
        if self.beta < 0.0 {
            return Err(bad("beta", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.n_g) {
            return Err(bad("n_g", "must lie in [0, 1]"));
        }
        match (self.omega_over_2pi, self.ec_over_h) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(bad("Omega_over_2pi", "supply exactly one of Omega_over_2pi, Ec_over_h"))
            }
            (Some(o), None) if !(o.is_finite() && o > 0.0) => return Err(bad("Omega_over_2pi", "must be > 0")),
            (None, Some(e)) if !(e.is_finite() && e > 0.0) => return Err(bad("Ec_over_h", "must be > 0")),
            _ => {}
        }
        match (self.x0, self.mass) {
            (Some(_), Some(_)) | (None, None) => return Err(bad("x0", "supply exactly one of x0, M")),
            (Some(x), None) if !(x.is_finite() && x > 0.0) => return Err(bad("x0", "must be > 0")),
            (None, Some(mm)) if !(mm.is_finite() && mm > 0.0) => return Err(bad("M", "must be > 0")),
            _ => {}
        }
        Ok(())
    }

    pub fn omega_b(&self) -> f64 {
        2.0 * PI * self.omega_b_over_2pi
    }

    pub fn zero_point_length(&self) -> f64 {
        match (self.x0, self.mass) {
            (Some(x), _) => x,
            (None, Some(mm)) => (HBAR / (2.0 * mm * self.omega_b())).sqrt(),
            (None, None) => f64::NAN,
        }
    }

    pub fn mass(&self) -> f64 {
        match (self.mass, self.x0) {
            (Some(mm), _) => mm,
            (None, Some(x)) => HBAR / (2.0 * self.omega_b() * x * x),
            (None, None) => f64::NAN,
        }
    }

    fn flux_sign(&self) -> f64 {
        if self.m.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Every derived symbol of the dispersive model. Frequencies are angular
/// (rad/s in physical units); energies `ec_bias` and `ej_signed` are in the
/// energy unit of `units` (J when physical, ħ = 1 when scaled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCouplings {
    pub units: Units,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub theta: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g_a: f64,
    pub g_b: f64,
    #[serde(rename = "Delta_a")]
    pub delta_a: f64,
    #[serde(rename = "Delta_b")]
    pub delta_b: f64,
    pub delta: f64,
    pub kappa: f64,
    pub x0: f64,
    pub p0: f64,
    /// `E_c (1 - 2 n_g)`
    pub ec_bias: f64,
    /// `(-1)^m E_J`
    pub ej_signed: f64,
}

impl DerivedCouplings {
    pub fn hbar(&self) -> f64 {
        self.units.hbar()
    }

    /// Couplings specified directly at the RWA level, in ħ = 1 units.
    /// `theta` fixes the charge-basis couplings `λ_a`, `λ_b` used by the
    /// full (pre-RWA) Hamiltonian.
    pub fn scaled(omega_q: f64, omega_a: f64, omega_b: f64, g_a: f64, g_b: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let lambda_a = if s != 0.0 { -g_a / s } else { 0.0 };
        let lambda_b = if c != 0.0 { g_b / c } else { 0.0 };
        let mut out = Self {
            units: Units::Scaled,
            lambda_a,
            lambda_b,
            theta,
            sin_theta: s,
            cos_theta: c,
            omega: omega_q,
            omega_a,
            omega_b,
            g_a,
            g_b,
            delta_a: 0.0,
            delta_b: 0.0,
            delta: 0.0,
            kappa: 0.0,
            x0: std::f64::consts::FRAC_1_SQRT_2,
            p0: std::f64::consts::FRAC_1_SQRT_2,
            ec_bias: omega_q * c,
            ej_signed: omega_q * s / 2.0,
        };
        out.refresh();
        out
    }

    /// Recomputes detunings and κ from the frequencies and `g_a`, `g_b`.
    pub fn refresh(&mut self) {
        self.delta_a = self.omega - self.omega_a;
        self.delta_b = self.omega - 2.0 * self.omega_b;
        self.delta = 2.0 * self.omega_b - self.omega_a;
        self.kappa = kappa_from(self.g_a, self.g_b, self.delta_a, self.delta_b);
    }

    /// Same frequencies with `g_a`, `g_b` (and `λ_a`, `λ_b`) scaled by `s`.
    pub fn with_coupling_scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.g_a *= s;
        out.g_b *= s;
        out.lambda_a *= s;
        out.lambda_b *= s;
        out.refresh();
        out
    }
}

fn kappa_from(g_a: f64, g_b: f64, delta_a: f64, delta_b: f64) -> f64 {
    -0.5 * g_a * g_b * (1.0 / delta_a + 1.0 / delta_b)
}

/// Maps raw parameters to the dispersive couplings.
///
/// `allow_degenerate` permits `n_g = 1/2`, where `cos θ = 0` switches off
/// the mechanical coupling.
pub fn derive_couplings(params: &DeviceParams, allow_degenerate: bool) -> Result<DerivedCouplings> {
    params.validate()?;
    let degenerate = params.n_g == 0.5;
    if degenerate && !allow_degenerate {
        return Err(Error::DegenerateMixingAngle);
    }
    let sign_m = params.flux_sign();
    let ej = PLANCK * params.ej_over_h;
    let ej_signed = sign_m * ej;

    // E_c (1 - 2 n_g), either given through E_c or back-solved from Ω
    let ec_bias = match (params.ec_over_h, params.omega_over_2pi) {
        (Some(ec), _) => PLANCK * ec * (1.0 - 2.0 * params.n_g),
        (None, Some(om)) => {
            let split = PLANCK * om;
            let rest = split * split - 4.0 * ej * ej;
            if rest < -1e-12 * split * split {
                return Err(Error::InvalidParameter {
                    field: "Omega_over_2pi".into(),
                    reason: format!("Omega/2pi = {om} Hz is below 2 E_J/h = {} Hz", 2.0 * params.ej_over_h),
                });
            }
            if degenerate {
                if rest.abs() > 1e-9 * split * split {
                    return Err(Error::InvalidParameter {
                        field: "Omega_over_2pi".into(),
                        reason: "at n_g = 1/2 Omega must equal 2 E_J / hbar".into(),
                    });
                }
                0.0
            } else {
                (1.0 - 2.0 * params.n_g).signum() * rest.max(0.0).sqrt()
            }
        }
        (None, None) => unreachable!("validated"),
    };

    let omega = (ec_bias * ec_bias + 4.0 * ej * ej).sqrt() / HBAR;
    let theta = f64::atan2(2.0 * ej_signed, ec_bias);
    let (sin_theta, cos_theta) = if degenerate {
        (sign_m, 0.0)
    } else {
        theta.sin_cos()
    };

    let x0 = params.zero_point_length();
    let p0 = HBAR / (2.0 * x0);
    let omega_a = 2.0 * PI * params.omega_a_over_2pi;
    let omega_b = params.omega_b();

    // ħλ_a = e (C_g/C_Σ) V₀
    let lambda_a = ELEMENTARY_CHARGE * params.cg_over_csigma * params.v0 / HBAR;
    // ħλ_b = (-1)^m E_J (π B W)² x₀² / (2 Φ₀²)
    let k = PI * params.b_field * params.width / FLUX_QUANTUM;
    let lambda_b = ej_signed * k * k * x0 * x0 / (2.0 * HBAR);

    let g_a = -lambda_a * sin_theta;
    let g_b = lambda_b * cos_theta;
    let mut out = DerivedCouplings {
        units: Units::Physical,
        lambda_a,
        lambda_b,
        theta,
        sin_theta,
        cos_theta,
        omega,
        omega_a,
        omega_b,
        g_a,
        g_b,
        delta_a: 0.0,
        delta_b: 0.0,
        delta: 0.0,
        kappa: 0.0,
        x0,
        p0,
        ec_bias,
        ej_signed,
    };
    out.refresh();
    Ok(out)
}

/// Taylor coefficients `c_n` (J/mⁿ) of `E_J(x) = -E_J cos(π(Φ_e⁰ + B W x)/Φ₀)`
/// about `x = 0`, for `n = 0..=order`.
pub fn josephson_expansion(params: &DeviceParams, flux_bias_phi0_units: f64, order: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if order > 6 {
        return Err(Error::InvalidParameter {
            field: "order".into(),
            reason: "expansion order must be <= 6".into(),
        });
    }
    let ej = PLANCK * params.ej_over_h;
    let k = PI * params.b_field * params.width / FLUX_QUANTUM;
    let twice_bias = 2.0 * flux_bias_phi0_units;
    let mut out = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for n in 0..=order {
        if n > 0 {
            fact *= n as f64;
        }
        // d^n/dx^n cos(φ + kx) = k^n cos(φ + nπ/2), φ in units of π/2 is 2·bias
        let c = if twice_bias.fract() == 0.0 {
            quarter_turn_cos(twice_bias as i64 + n as i64)
        } else {
            (PI / 2.0 * (twice_bias + n as f64)).cos()
        };
        out.push(-ej * k.powi(n as i32) * c / fact);
    }
    Ok(out)
}

/// `cos(j π / 2)` without rounding error.
fn quarter_turn_cos(j: i64) -> f64 {
    match j.rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// Closed-form `E_J(x)` for comparison with [`josephson_expansion`].
pub fn josephson_energy(params: &DeviceParams, flux_bias_phi0_units: f64, x: f64) -> f64 {
    let ej = PLANCK * params.ej_over_h;
    -ej * (PI * (flux_bias_phi0_units + params.b_field * params.width * x / FLUX_QUANTUM)).cos()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeEntry {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub threshold: f64,
    pub entries: Vec<RegimeEntry>,
    pub pass: bool,
}

impl RegimeReport {
    pub fn entry(&self, name: &str) -> Option<&RegimeEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Default ratio for a `≫` condition to count as satisfied.
pub const MUCH_GREATER: f64 = 10.0;
/// Resonance tolerance on `|δ| / ω_b`.
pub const RESONANCE_TOL: f64 = 1e-9;

fn much_greater(name: &str, left: f64, right: f64, threshold: f64) -> RegimeEntry {
    let ratio = (left / right).abs();
    let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
    RegimeEntry {
        name: name.into(),
        left,
        right,
        ratio,
        pass: ratio >= threshold,
    }
}

/// Checks the approximations the effective model relies on.
pub fn validate_regimes(c: &DerivedCouplings, noise: Option<&NoiseModel>, tau: Option<f64>, threshold: f64) -> RegimeReport {
    let mut entries = vec![
        much_greater("large_detuning_a", c.delta_a.abs(), c.g_a.abs(), threshold),
        much_greater("large_detuning_b", c.delta_b.abs(), c.g_b.abs(), threshold),
    ];
    let res_ratio = (c.delta / c.omega_b).abs();
    entries.push(RegimeEntry {
        name: "resonance".into(),
        left: c.delta,
        right: c.omega_b,
        ratio: res_ratio,
        pass: res_ratio <= RESONANCE_TOL,
    });
    entries.push(much_greater("stark_small_a", c.omega_a, c.g_a * c.g_a / c.delta_a, threshold));
    entries.push(much_greater("stark_small_b", c.omega_b, c.g_b * c.g_b / c.delta_b, threshold));
    if let (Some(noise), Some(tau)) = (noise, tau) {
        let inv_tau = 1.0 / tau;
        entries.push(much_greater("noise_slow", inv_tau, noise.linewidth, threshold));
        entries.push(much_greater("noise_fast", 2.0 * c.kappa * noise.beta, inv_tau, threshold));
    }
    let pass = entries.iter().all(|e| e.pass);
    RegimeReport {
        threshold,
        entries,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn over_2pi(w: f64) -> f64 {
        w / (2.0 * PI)
    }

    #[test]
    fn reference_intermediate_values() {
        let c = derive_couplings(&DeviceParams::reference(), false).unwrap();
        assert!((c.sin_theta.abs() - 0.8).abs() < 1e-12);
        assert!((c.cos_theta.abs() - 0.6).abs() < 1e-12);
        // hand evaluation: e·0.1·2 µV / ħ / 2π
        assert!((over_2pi(c.lambda_a) / 48.3598e6 - 1.0).abs() < 1e-5);
        assert!((over_2pi(c.g_a).abs() / 38.6878e6 - 1.0).abs() < 1e-5);
        assert!((over_2pi(c.lambda_b) / 184.654 - 1.0).abs() < 1e-5);
        assert!((over_2pi(c.g_b).abs() / 110.792 - 1.0).abs() < 1e-5);
        assert!((over_2pi(c.delta_a) / 7e9 - 1.0).abs() < 1e-12);
        assert!((over_2pi(c.delta_b) / 7e9 - 1.0).abs() < 1e-12);
        assert!((over_2pi(c.omega) / 10e9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn omega_identity() {
        let c = derive_couplings(&DeviceParams::reference(), false).unwrap();
        let lhs = c.omega * c.omega;
        let rhs = (c.ec_bias / HBAR).powi(2) + (2.0 * c.ej_signed / HBAR).powi(2);
        assert!((lhs / rhs - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kappa_sign_flips_across_half() {
        let hi = derive_couplings(&DeviceParams::reference(), false).unwrap();
        let lo = derive_couplings(&DeviceParams { n_g: 0.4, ..DeviceParams::reference() }, false).unwrap();
        assert!((hi.kappa + lo.kappa).abs() < 1e-12 * hi.kappa.abs());
        assert!(hi.kappa < 0.0 && lo.kappa > 0.0);
        assert!((over_2pi(hi.kappa).abs() / 0.61233 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn degenerate_mixing_angle() {
        let p = DeviceParams {
            n_g: 0.5,
            omega_over_2pi: Some(8e9),
            ..DeviceParams::reference()
        };
        assert_eq!(derive_couplings(&p, false), Err(Error::DegenerateMixingAngle));
        let c = derive_couplings(&p, true).unwrap();
        assert_eq!(c.g_b, 0.0);
        assert_eq!(c.kappa, 0.0);
    }

    #[test]
    fn ec_and_omega_inputs_agree() {
        let p = DeviceParams::reference();
        let via_omega = derive_couplings(&p, false).unwrap();
        // E_c (1 - 2·0.6)/h = -6 GHz  =>  E_c/h = 30 GHz
        let q = DeviceParams {
            omega_over_2pi: None,
            ec_over_h: Some(30e9),
            ..p
        };
        let via_ec = derive_couplings(&q, false).unwrap();
        assert!((via_ec.kappa / via_omega.kappa - 1.0).abs() < 1e-12);
        assert!((via_ec.theta - via_omega.theta).abs() < 1e-12);
    }

    #[test]
    fn mass_and_x0_inputs_agree() {
        let p = DeviceParams::reference();
        let m = p.mass();
        let q = DeviceParams { x0: None, mass: Some(m), ..p.clone() };
        let a = derive_couplings(&p, false).unwrap();
        let b = derive_couplings(&q, false).unwrap();
        assert!((a.lambda_b / b.lambda_b - 1.0).abs() < 1e-12);
        // paper's mass form: (-1)^m E_J (πBW)² / (4 M ω_b Φ₀²)
        let k = PI * p.b_field * p.width / FLUX_QUANTUM;
        let mass_form = PLANCK * p.ej_over_h * k * k / (4.0 * m * p.omega_b()) / 1.0;
        assert!((a.lambda_b / mass_form - 1.0).abs() < 1e-12);
        assert!((a.x0 * a.p0 / (HBAR / 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let both = DeviceParams { ec_over_h: Some(1e9), ..DeviceParams::reference() };
        assert!(matches!(both.validate(), Err(Error::InvalidParameter { .. })));
        let neither = DeviceParams { x0: None, ..DeviceParams::reference() };
        assert!(neither.validate().is_err());
        let bad_ng = DeviceParams { n_g: 1.5, ..DeviceParams::reference() };
        assert!(bad_ng.validate().is_err());
        let low_omega = DeviceParams { omega_over_2pi: Some(5e9), ..DeviceParams::reference() };
        assert!(derive_couplings(&low_omega, false).is_err());
    }

    #[test]
    fn expansion_at_integer_bias() {
        let p = DeviceParams::reference();
        let c = josephson_expansion(&p, 0.0, 4).unwrap();
        let ej = PLANCK * p.ej_over_h;
        assert_eq!(c[0], -ej);
        assert_eq!(c[1], 0.0);
        assert_eq!(c[3], 0.0);
        let d = derive_couplings(&p, false).unwrap();
        let x0 = d.x0;
        assert!((c[2] * x0 * x0 / (HBAR * d.lambda_b) - 1.0).abs() < 1e-12);
        // odd m flips every coefficient
        let c_odd = josephson_expansion(&p, 1.0, 2).unwrap();
        assert_eq!(c_odd[0], ej);
        assert_eq!(c_odd[2], -c[2]);
    }

    #[test]
    fn expansion_at_half_integer_bias() {
        let p = DeviceParams::reference();
        let c = josephson_expansion(&p, 0.5, 3).unwrap();
        let ej = PLANCK * p.ej_over_h;
        let k = PI * p.b_field * p.width / FLUX_QUANTUM;
        assert_eq!(c[0], 0.0);
        assert_eq!(c[2], 0.0);
        assert!((c[1].abs() / (ej * k) - 1.0).abs() < 1e-14);
        assert!(josephson_expansion(&p, 0.0, 7).is_err());
    }

    #[test]
    fn expansion_converges_to_closed_form() {
        let p = DeviceParams::reference();
        let x0 = p.zero_point_length();
        for bias in [0.0, 0.25, 0.5, 1.0, 0.37] {
            let c = josephson_expansion(&p, bias, 6).unwrap();
            for frac in [-3.0, -1.0, 0.5, 3.0] {
                let x = frac * x0;
                let series: f64 = c.iter().enumerate().map(|(n, cn)| cn * x.powi(n as i32)).sum();
                let exact = josephson_energy(&p, bias, x);
                let scale = PLANCK * p.ej_over_h;
                assert!(((series - exact) / scale).abs() <= 1e-10, "bias {bias} x {frac}");
            }
        }
    }

    #[test]
    fn regimes_for_reference_set() {
        let c = derive_couplings(&DeviceParams::reference(), false).unwrap();
        let r = validate_regimes(&c, None, None, MUCH_GREATER);
        assert!(r.pass, "{r:?}");
        let ratio = r.entry("large_detuning_a").unwrap().ratio;
        assert!((ratio - 180.935).abs() < 0.01);
    }

    #[test]
    fn regimes_detect_failures() {
        let mut c = DerivedCouplings::scaled(10.0, 3.0, 1.5, 0.3, 0.2, 0.9);
        c.g_a = c.delta_a;
        let r = validate_regimes(&c, None, None, MUCH_GREATER);
        let e = r.entry("large_detuning_a").unwrap();
        assert_eq!(e.ratio, 1.0);
        assert!(!e.pass && !r.pass);

        let off = DerivedCouplings::scaled(10.0, 3.2, 1.5, 0.3, 0.2, 0.9);
        let r = validate_regimes(&off, None, None, MUCH_GREATER);
        let res = r.entry("resonance").unwrap();
        assert!(!res.pass);
        assert!((res.left - (-0.2)).abs() < 1e-12);
    }

    #[test]
    fn noise_limits_reported() {
        let c = DerivedCouplings::scaled(10.0, 3.0, 1.5, 0.3, 0.2, 0.9);
        let noise = NoiseModel {
            linewidth: 1e-6,
            beta: 100.0,
            ..NoiseModel::default()
        };
        let r = validate_regimes(&c, Some(&noise), Some(1e3), MUCH_GREATER);
        assert!(r.entry("noise_slow").is_some());
        assert!(r.entry("noise_fast").is_some());
    }
}
