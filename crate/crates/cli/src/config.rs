use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use squeeze_core::device::{derive_couplings, DerivedCouplings, DeviceParams};
use squeeze_core::evolution::NoiseModel;
use squeeze_core::Units;

use crate::error::CliError;

/// Smallest frequency (Hz) accepted in physical mode.
pub const PHYSICAL_MIN_HZ: f64 = 1e3;
/// Largest frequency accepted in scaled mode.
pub const SCALED_MAX: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub units: Units,
    #[serde(default)]
    pub device: Option<DeviceParams>,
    #[serde(default)]
    pub scaled: Option<ScaledCouplings>,
    #[serde(default)]
    pub spaces: Option<Spaces>,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub evolve: Option<EvolveSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Interaction time (s) for the noise entries of the regime report.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub regime_threshold: Option<f64>,
    #[serde(default)]
    pub allow_degenerate: bool,
}

/// RWA-level couplings in arbitrary units; every rate is divided by 2π.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledCouplings {
    #[serde(rename = "Omega_over_2pi")]
    pub omega_over_2pi: f64,
    pub omega_a_over_2pi: f64,
    pub omega_b_over_2pi: f64,
    pub g_a_over_2pi: f64,
    pub g_b_over_2pi: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    0.8f64.atan2(0.6)
}

impl ScaledCouplings {
    /// Benchmark with `g/Δ ≈ 0.04` at exact resonance `ω_a = 2ω_b`.
    pub fn benchmark() -> Self {
        Self {
            omega_over_2pi: 10.0,
            omega_a_over_2pi: 3.0,
            omega_b_over_2pi: 1.5,
            g_a_over_2pi: 0.3,
            g_b_over_2pi: 0.2,
            theta: default_theta(),
        }
    }

    pub fn couplings(&self) -> DerivedCouplings {
        let t = 2.0 * PI;
        DerivedCouplings::scaled(
            t * self.omega_over_2pi,
            t * self.omega_a_over_2pi,
            t * self.omega_b_over_2pi,
            t * self.g_a_over_2pi,
            t * self.g_b_over_2pi,
            self.theta,
        )
    }

    fn validate(&self) -> Result<(), CliError> {
        let freqs = [
            ("scaled.Omega_over_2pi", self.omega_over_2pi),
            ("scaled.omega_a_over_2pi", self.omega_a_over_2pi),
            ("scaled.omega_b_over_2pi", self.omega_b_over_2pi),
        ];
        for (name, v) in freqs {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::config(format!("`{name}` must be finite and > 0")));
            }
            if v > SCALED_MAX {
                return Err(CliError::config(format!(
                    "`{name}` = {v} looks like a physical frequency; scaled mode expects values <= {SCALED_MAX}"
                )));
            }
        }
        for (name, v) in [("scaled.g_a_over_2pi", self.g_a_over_2pi), ("scaled.g_b_over_2pi", self.g_b_over_2pi), ("scaled.theta", self.theta)] {
            if !v.is_finite() {
                return Err(CliError::config(format!("`{name}` must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spaces {
    #[serde(rename = "N_a")]
    pub n_a: usize,
    #[serde(rename = "N_b")]
    pub n_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSpec {
    #[serde(default = "default_models")]
    pub models: Vec<String>,
    /// Final time; defaults to one conversion period, or to `ξ = 1` when
    /// only the parametric model runs.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "one")]
    pub init_n_a: usize,
    #[serde(default)]
    pub init_n_b: usize,
    #[serde(default = "one_f")]
    pub beta: f64,
    #[serde(default = "half_pi")]
    pub phi: f64,
    /// Angular `κ` for the parametric model; defaults to the couplings' `κ`.
    #[serde(default)]
    pub kappa: Option<f64>,
}

fn default_models() -> Vec<String> {
    vec!["full-rwa".into(), "pdc".into()]
}

fn default_points() -> usize {
    101
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

impl Default for EvolveSpec {
    fn default() -> Self {
        Self {
            models: default_models(),
            t_max: None,
            points: default_points(),
            init_n_a: 1,
            init_n_b: 0,
            beta: 1.0,
            phi: FRAC_PI_2,
            kappa: None,
        }
    }
}

/// Parsed configuration together with the digest of its canonical form.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Option<RunConfig>,
    pub digest: String,
}

/// SHA-256 of the compact, key-sorted JSON form of `value`.
pub fn digest(value: &serde_json::Value) -> String {
    // serde_json maps are ordered by key
    let canonical = serde_json::to_string(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn load(path: Option<&Path>) -> Result<Loaded, CliError> {
    let Some(path) = path else {
        return Ok(Loaded {
            config: None,
            digest: digest(&serde_json::Value::Object(Default::default())),
        });
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("config is not valid JSON: {e}")))?;
    let config: RunConfig =
        serde_json::from_value(value.clone()).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
    config.validate()?;
    Ok(Loaded {
        config: Some(config),
        digest: digest(&value),
    })
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(d) = &self.device {
            d.validate().map_err(CliError::from_core)?;
            if self.units == Units::Physical {
                let mut freqs = vec![
                    ("device.EJ_over_h", d.ej_over_h),
                    ("device.omega_a_over_2pi", d.omega_a_over_2pi),
                    ("device.omega_b_over_2pi", d.omega_b_over_2pi),
                ];
                freqs.extend(d.omega_over_2pi.map(|v| ("device.Omega_over_2pi", v)));
                freqs.extend(d.ec_over_h.map(|v| ("device.Ec_over_h", v)));
                for (name, v) in freqs {
                    if v <= PHYSICAL_MIN_HZ {
                        return Err(CliError::config(format!(
                            "`{name}` = {v} Hz is too small for physical units (must exceed {PHYSICAL_MIN_HZ} Hz)"
                        )));
                    }
                }
            }
        }
        if let Some(s) = &self.scaled {
            if self.units == Units::Physical {
                return Err(CliError::config("a `scaled` block requires `units: scaled`"));
            }
            s.validate()?;
        }
        if let Some(sp) = &self.spaces {
            if sp.n_a < 2 || sp.n_b < 2 {
                return Err(CliError::config("`spaces.N_a` and `spaces.N_b` must be >= 2"));
            }
        }
        if let Some(n) = &self.noise {
            n.validate().map_err(CliError::from_core)?;
        }
        if let Some(e) = &self.evolve {
            if e.points < 2 {
                return Err(CliError::config("`evolve.points` must be >= 2"));
            }
            if e.t_max.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return Err(CliError::config("`evolve.t_max` must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn device(&self) -> Result<&DeviceParams, CliError> {
        self.device
            .as_ref()
            .ok_or_else(|| CliError::config("config has no `device` block"))
    }

    pub fn physical_couplings(&self, allow_degenerate: bool) -> Result<DerivedCouplings, CliError> {
        derive_couplings(self.device()?, allow_degenerate || self.allow_degenerate).map_err(CliError::from_core)
    }

    /// Couplings for dynamics, which only run in scaled units.
    pub fn scaled_couplings(&self) -> Result<DerivedCouplings, CliError> {
        if self.units != Units::Scaled {
            return Err(CliError::config(
                "dynamics need `units: scaled`; physical couplings put the conversion period ~1e9 drive periods away",
            ));
        }
        Ok(self.scaled.clone().unwrap_or_else(ScaledCouplings::benchmark).couplings())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_key_order_and_whitespace() {
        let a: serde_json::Value = serde_json::from_str(r#"{"units":"scaled","seed":3}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str("{ \"seed\": 3,\n \"units\": \"scaled\" }").unwrap();
        assert_eq!(digest(&a), digest(&b));
        let c: serde_json::Value = serde_json::from_str(r#"{"units":"scaled","seed":4}"#).unwrap();
        assert_ne!(digest(&a), digest(&c));
    }

    #[test]
    fn units_are_mandatory() {
        let err = serde_json::from_str::<RunConfig>(r#"{"seed": 1}"#).unwrap_err();
        assert!(err.to_string().contains("units"));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"units":"scaled","sead":1}"#).is_err());
    }

    #[test]
    fn benchmark_is_resonant() {
        let c = ScaledCouplings::benchmark().couplings();
        assert_eq!(c.delta, 0.0);
        assert!((c.g_a / c.delta_a - 0.3 / 7.0).abs() < 1e-15);
    }
}
