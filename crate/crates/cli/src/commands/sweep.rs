use std::f64::consts::PI;

use serde_json::Value;
use squeeze_core::device::{derive_couplings, DerivedCouplings, DeviceParams};
use squeeze_core::table::{Cell, ResultTable};
use squeeze_core::Units;

use super::Ctx;
use crate::error::{CliError, CliResult};

pub struct SweepArgs<'a> {
    pub param: &'a str,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub emit: &'a [String],
    pub hold_product: bool,
}

/// Quantities `--emit` understands.
pub const QUANTITIES: [&str; 19] = [
    "kappa",
    "kappa_over_2pi_hz",
    "g_a",
    "g_a_over_2pi_hz",
    "g_b",
    "g_b_over_2pi_hz",
    "lambda_a",
    "lambda_a_over_2pi_hz",
    "lambda_b",
    "lambda_b_over_2pi_hz",
    "theta",
    "sin_theta",
    "cos_theta",
    "Omega",
    "Delta_a",
    "Delta_b",
    "delta",
    "x0",
    "p0",
];

fn quantity(c: &DerivedCouplings, name: &str) -> f64 {
    let hz = |w: f64| w / (2.0 * PI);
    match name {
        "kappa" => c.kappa,
        "kappa_over_2pi_hz" => hz(c.kappa),
        "g_a" => c.g_a,
        "g_a_over_2pi_hz" => hz(c.g_a),
        "g_b" => c.g_b,
        "g_b_over_2pi_hz" => hz(c.g_b),
        "lambda_a" => c.lambda_a,
        "lambda_a_over_2pi_hz" => hz(c.lambda_a),
        "lambda_b" => c.lambda_b,
        "lambda_b_over_2pi_hz" => hz(c.lambda_b),
        "theta" => c.theta,
        "sin_theta" => c.sin_theta,
        "cos_theta" => c.cos_theta,
        "Omega" => c.omega,
        "Delta_a" => c.delta_a,
        "Delta_b" => c.delta_b,
        "delta" => c.delta,
        "x0" => c.x0,
        "p0" => c.p0,
        _ => unreachable!("validated against QUANTITIES"),
    }
}

/// Evenly spaced values from `from` to `to`, endpoints exact.
pub fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n)
            .map(|k| if k == n - 1 { to } else { from + (to - from) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

fn with_field(base: &Value, field: &str, v: f64) -> CliResult<DeviceParams> {
    let mut obj = base.clone();
    let slot = obj
        .get_mut(field)
        .ok_or_else(|| CliError::config(format!("unknown or unset device field `{field}`")))?;
    if !slot.is_number() {
        return Err(CliError::config(format!("device field `{field}` is not numeric")));
    }
    *slot = if field == "m" {
        if v.fract() != 0.0 {
            return Err(CliError::config("`m` only takes integer values"));
        }
        Value::from(v as i64)
    } else {
        Value::from(v)
    };
    serde_json::from_value(obj).map_err(|e| CliError::config(format!("invalid device after setting `{field}`: {e}")))
}

pub fn run(ctx: &Ctx, args: &SweepArgs) -> CliResult<()> {
    let cfg = ctx.config()?;
    if cfg.units != Units::Physical {
        return Err(CliError::config("sweep evaluates SI device formulas and needs `units: physical`"));
    }
    let device = cfg.device()?;
    if let Some(bad) = args.emit.iter().find(|q| !QUANTITIES.contains(&q.as_str())) {
        return Err(CliError::config(format!("unknown quantity `{bad}`; choose from {}", QUANTITIES.join(", "))));
    }
    if args.steps == 0 {
        return Err(CliError::config("--steps must be >= 1"));
    }
    if !(args.from.is_finite() && args.to.is_finite()) {
        return Err(CliError::config("--from and --to must be finite"));
    }
    let partner = match (args.hold_product, args.param) {
        (false, _) => None,
        (true, "B") => Some("W"),
        (true, "W") => Some("B"),
        (true, other) => return Err(CliError::config(format!("--hold-product applies to B or W, not `{other}`"))),
    };
    let base = serde_json::to_value(device).expect("device serializes");
    let product = device.b_field * device.width;
    let allow_degenerate = ctx.cli.allow_degenerate || cfg.allow_degenerate;

    let mut columns: Vec<&str> = vec![args.param];
    columns.extend(args.emit.iter().map(String::as_str));
    let mut table = ResultTable::new(&columns);
    let mut skipped = 0usize;
    for v in sweep_values(args.from, args.to, args.steps) {
        let mut v = v;
        if args.param == "n_g" && (v - 0.5).abs() < 1e-12 {
            if !allow_degenerate {
                skipped += 1;
                continue;
            }
            v = 0.5;
        }
        let mut p = with_field(&base, args.param, v)?;
        if let Some(other) = partner {
            if v == 0.0 {
                return Err(CliError::config("--hold-product cannot pass through zero"));
            }
            let base_p = serde_json::to_value(&p).expect("device serializes");
            p = with_field(&base_p, other, product / v)?;
        }
        let c = derive_couplings(&p, allow_degenerate)?;
        let mut row: Vec<Cell> = vec![v.into()];
        row.extend(args.emit.iter().map(|q| Cell::from(quantity(&c, q))));
        table.push(row)?;
    }
    let meta = ctx.meta("sweep");
    meta.stamp(&mut table);
    table.set_meta("skipped", skipped.to_string());
    ctx.out.write_csv("sweep.csv", &table)?;
    Ok(())
}
