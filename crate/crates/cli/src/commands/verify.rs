use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use squeeze_core::device::DerivedCouplings;
use squeeze_core::hamiltonian::{
    build_rwa, build_total, excitation_operator, frohlich_generator, third_order_scaling, verify_frohlich,
};
use squeeze_core::quantum::{SpaceDescriptor, NMR};
use squeeze_core::squeezing::{
    bogoliubov_residuals, predicted_variances, quadrature_variances_unguarded, squeezed_vacuum, SqueezeSpec,
    VarianceMode, FIG2_COLUMNS, QUADRATURE_LEAKAGE_TOL,
};
use squeeze_core::Units;

use super::Ctx;
use crate::config::{ScaledCouplings, Spaces};
use crate::error::{CliError, CliResult};
use crate::output::{embedded_digest, read_csv, Meta};
use crate::Suite;

/// Measured value against its acceptance bound.
#[derive(Debug, Clone, Serialize)]
pub struct Property {
    pub name: String,
    pub measured: f64,
    pub bound: String,
    pub pass: bool,
}

impl Property {
    fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: format!("<= {bound:e}"),
            pass: measured <= bound,
        }
    }

    fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&measured),
        }
    }

    fn holds(name: impl Into<String>, measured: f64, ok: bool, bound: &str) -> Self {
        Self {
            name: name.into(),
            measured,
            bound: bound.into(),
            pass: ok,
        }
    }
}

#[derive(Serialize)]
struct Report {
    meta: Meta,
    suite: &'static str,
    pass: bool,
    properties: Vec<Property>,
    details: Value,
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Frohlich => "frohlich",
        Suite::Rwa => "rwa",
        Suite::Bogoliubov => "bogoliubov",
        Suite::SqueezeLaw => "squeeze-law",
    }
}

/// Couplings for the algebraic suites: the config's scaled block, or the
/// benchmark when no config is given.
fn algebra_couplings(ctx: &Ctx) -> CliResult<DerivedCouplings> {
    match &ctx.loaded.config {
        None => Ok(ScaledCouplings::benchmark().couplings()),
        Some(cfg) if cfg.units == Units::Scaled => cfg.scaled_couplings(),
        Some(_) => Err(CliError::config(
            "this suite needs `units: scaled`; physical couplings sit below double-precision resolution of the BCH terms",
        )),
    }
}

fn spaces(ctx: &Ctx) -> Option<Spaces> {
    ctx.loaded.config.as_ref().and_then(|c| c.spaces)
}

fn frohlich(ctx: &Ctx) -> CliResult<(Vec<Property>, Value)> {
    let c = algebra_couplings(ctx)?;
    let (audit_n, scale_n) = match spaces(ctx) {
        Some(s) => ((s.n_a, s.n_b), (s.n_a, s.n_b)),
        None => ((8, 8), (6, 6)),
    };
    let space = SpaceDescriptor::qubit_stlr_nmr(audit_n.0, audit_n.1)?;
    let s = frohlich_generator(&c, &space)?;
    let scaling = third_order_scaling(&c, scale_n.0, scale_n.1)?;
    let rep = verify_frohlich(&c, audit_n.0, audit_n.1)?;
    let extra: Vec<&str> = rep.extra_terms.iter().map(|t| t.name.as_str()).collect();
    let props = vec![
        Property::at_most("generator_anti_hermitian", s.anti_hermiticity_residual() / s.max_abs(), 1e-12),
        Property::within("third_order_ratio", scaling.ratio, 6.8, 9.2),
        Property::at_most("listed_terms_rel_error", rep.max_listed_rel_error, 1e-10),
        Property::at_most("basis_fit_residual", rep.fit_residual, 1e-10),
        Property::at_most("interior_rel_residual", rep.interior_rel_residual, 1e-10),
        Property::at_most("pdc_coefficient_rel_error", rep.conversion_rel_error, 1e-10),
        Property::at_most("pdc_rel_residual", rep.pdc_rel_residual, 1e-10),
        Property::holds("extra_terms", extra.len() as f64, true, &format!("reported: {extra:?}")),
    ];
    let details = json!({
        "audit_space": { "N_a": audit_n.0, "N_b": audit_n.1 },
        "scaling_space": { "N_a": scale_n.0, "N_b": scale_n.1 },
        "scaling": scaling,
        "audit": rep,
    });
    Ok((props, details))
}

fn rwa(ctx: &Ctx) -> CliResult<(Vec<Property>, Value)> {
    let c = algebra_couplings(ctx)?;
    let (n_a, n_b) = spaces(ctx).map_or((5, 7), |s| (s.n_a, s.n_b));
    if n_a < 2 || n_b < 3 {
        return Err(CliError::config("rwa suite needs N_a >= 2 and N_b >= 3"));
    }
    let space = SpaceDescriptor::qubit_stlr_nmr(n_a, n_b)?;
    let h = build_rwa(&c, &space)?.angular();
    let total = build_total(&c, &space)?.angular();
    let m = excitation_operator(&space)?;
    let comm = h.commutator(&m)?.max_abs() / h.max_abs();
    let ga = h.get(space.flatten(&[1, 0, 0]), space.flatten(&[0, 1, 0])).re;
    let gb = h.get(space.flatten(&[1, 0, 0]), space.flatten(&[0, 0, 2])).re;
    let props = vec![
        Property::at_most("rwa_hermitian", h.relative_hermiticity_residual(), 1e-12),
        Property::at_most("total_hermitian", total.relative_hermiticity_residual(), 1e-12),
        Property::at_most("excitation_number_commutator", comm, 1e-12),
        Property::at_most("element_g_a_rel_error", (ga / c.g_a - 1.0).abs(), 1e-12),
        Property::at_most("element_g_b_sqrt2_rel_error", (gb / (c.g_b * 2f64.sqrt()) - 1.0).abs(), 1e-12),
    ];
    Ok((props, json!({ "space": { "N_a": n_a, "N_b": n_b } })))
}

fn bogoliubov(ctx: &Ctx, xis: Option<&[f64]>) -> CliResult<(Vec<Property>, Value)> {
    let dim = spaces(ctx).map_or(60, |s| s.n_b);
    let xis = xis.unwrap_or(&[0.0, 0.1, 0.3, 0.5]);
    let space = SpaceDescriptor::nmr(dim)?;
    let cut = 2 * dim / 3;
    let mut props = Vec::new();
    let mut rows = Vec::new();
    for &xi in xis {
        let (lower, upper) = bogoliubov_residuals(xi, &space, cut)?;
        props.push(Property::at_most(format!("residual_lower_xi_{xi}"), lower, 1e-8));
        rows.push(json!({ "xi": xi, "lower": lower, "upper": upper }));
    }
    Ok((props, json!({ "dim": dim, "cut": cut, "residuals": rows })))
}

fn squeeze_law(ctx: &Ctx, xis: Option<&[f64]>) -> CliResult<(Vec<Property>, Value)> {
    let dim = spaces(ctx).map_or(80, |s| s.n_b);
    let xis = xis.unwrap_or(&[0.2, 0.5, 0.8, 1.2]);
    let space = SpaceDescriptor::nmr(dim)?;
    let mut props = Vec::new();
    let mut rows = Vec::new();
    for &xi in xis {
        let state = squeezed_vacuum(&SqueezeSpec::unit(xi, FRAC_PI_2), &space)?;
        let v = quadrature_variances_unguarded(&state, 1.0, 1.0)?;
        let want = predicted_variances(xi, 0.0, VarianceMode::Ideal)?;
        let leak = state.leakage(NMR)?;
        let (ex, ep) = ((v.dx / want.dx - 1.0).abs(), (v.dp / want.dp - 1.0).abs());
        let product = (v.dx * v.dp - 1.0).abs();
        props.push(Property::at_most(format!("dx_rel_error_xi_{xi}"), ex, 1e-6));
        props.push(Property::at_most(format!("dp_rel_error_xi_{xi}"), ep, 1e-6));
        props.push(Property::at_most(format!("uncertainty_product_xi_{xi}"), product, 1e-6));
        props.push(Property::at_most(format!("leakage_xi_{xi}"), leak, QUADRATURE_LEAKAGE_TOL));
        rows.push(json!({ "xi": xi, "dx": v.dx, "dp": v.dp, "leakage": leak }));
    }
    Ok((props, json!({ "dim": dim, "points": rows })))
}

fn overlay(ctx: &Ctx, path: &Path) -> CliResult<Vec<Property>> {
    let found = embedded_digest(path)?;
    let same = found.as_deref() == Some(ctx.loaded.digest.as_str());
    let mut props = vec![Property::holds(
        "overlay_digest",
        f64::from(u8::from(same)),
        same,
        &format!("== {}", ctx.loaded.digest),
    )];
    let (header, rows) = match read_csv(path) {
        Ok(t) if path.extension().is_some_and(|e| e == "csv") => t,
        _ => return Ok(props),
    };
    if header != FIG2_COLUMNS {
        return Ok(props);
    }
    // |mc − analytic| / stderr over rows carrying Monte Carlo values
    let z = rows
        .iter()
        .filter_map(|r| match (r[2], r[3], r[4]) {
            (Some(a), Some(m), Some(se)) if se > 0.0 => Some((m - a).abs() / se),
            (Some(a), Some(m), Some(_)) => Some(if (m - a).abs() <= 1e-6 { 0.0 } else { f64::INFINITY }),
            _ => None,
        })
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    if let Some(z) = z {
        props.push(Property::at_most("overlay_mc_max_z", z, 3.0));
    }
    Ok(props)
}

pub fn run(ctx: &Ctx, suite: Suite, xis: Option<&[f64]>, overlay_path: Option<&Path>) -> CliResult<()> {
    if let Some(bad) = xis.and_then(|x| x.iter().find(|v| !v.is_finite())) {
        return Err(CliError::config(format!("--xi value {bad} is not finite")));
    }
    let (mut props, details) = match suite {
        Suite::Frohlich => frohlich(ctx)?,
        Suite::Rwa => rwa(ctx)?,
        Suite::Bogoliubov => bogoliubov(ctx, xis)?,
        Suite::SqueezeLaw => squeeze_law(ctx, xis)?,
    };
    if let Some(p) = overlay_path {
        props.extend(overlay(ctx, p)?);
    }
    let pass = props.iter().all(|p| p.pass);
    let failed: Vec<String> = props.iter().filter(|p| !p.pass).map(|p| p.name.clone()).collect();
    let report = Report {
        meta: ctx.meta(&format!("verify {}", suite_name(suite))),
        suite: suite_name(suite),
        pass,
        properties: props,
        details,
    };
    ctx.out.write_json("report.json", &report)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "suite {} failed: {}",
            suite_name(suite),
            failed.join(", ")
        )))
    }
}
