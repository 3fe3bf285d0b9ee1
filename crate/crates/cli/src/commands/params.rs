use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;
use squeeze_core::device::{validate_regimes, DerivedCouplings, RegimeReport, MUCH_GREATER};
use squeeze_core::Units;

use super::Ctx;
use crate::config::ScaledCouplings;
use crate::error::{CliError, CliResult};
use crate::output::Meta;

#[derive(Serialize)]
struct ParamsReport {
    meta: Meta,
    units: Units,
    /// `κ/2π` in Hz (physical units) or in the config's frequency unit.
    kappa_over_2pi_hz: f64,
    couplings: DerivedCouplings,
    /// Every angular rate divided by 2π.
    over_2pi: BTreeMap<&'static str, f64>,
    regimes: RegimeReport,
}

/// Angular rates of `c` divided by 2π, keyed by field name.
pub fn over_2pi(c: &DerivedCouplings) -> BTreeMap<&'static str, f64> {
    [
        ("lambda_a", c.lambda_a),
        ("lambda_b", c.lambda_b),
        ("Omega", c.omega),
        ("omega_a", c.omega_a),
        ("omega_b", c.omega_b),
        ("g_a", c.g_a),
        ("g_b", c.g_b),
        ("Delta_a", c.delta_a),
        ("Delta_b", c.delta_b),
        ("delta", c.delta),
        ("kappa", c.kappa),
    ]
    .into_iter()
    .map(|(k, v)| (k, v / (2.0 * PI)))
    .collect()
}

pub fn run(ctx: &Ctx) -> CliResult<()> {
    let cfg = ctx.config()?;
    let c = match (&cfg.device, &cfg.scaled, cfg.units) {
        (Some(_), _, _) => cfg.physical_couplings(ctx.cli.allow_degenerate)?,
        (None, Some(s), Units::Scaled) => s.couplings(),
        (None, None, Units::Scaled) => ScaledCouplings::benchmark().couplings(),
        (None, _, Units::Physical) => return Err(CliError::config("config has no `device` block")),
    };
    let threshold = cfg.regime_threshold.unwrap_or(MUCH_GREATER);
    let regimes = validate_regimes(&c, cfg.noise.as_ref(), cfg.tau, threshold);
    let pass = regimes.pass;
    let failed: Vec<String> = regimes.entries.iter().filter(|e| !e.pass).map(|e| e.name.clone()).collect();
    let report = ParamsReport {
        meta: ctx.meta("params"),
        units: c.units,
        kappa_over_2pi_hz: c.kappa / (2.0 * PI),
        over_2pi: over_2pi(&c),
        couplings: c,
        regimes,
    };
    ctx.out.write_json("params.json", &report)?;
    if ctx.cli.strict && !pass {
        return Err(CliError::Validation(format!("regime checks failed: {}", failed.join(", "))));
    }
    Ok(())
}
