use squeeze_core::C64;
use serde::Serialize;
use squeeze_core::device::DerivedCouplings;
use squeeze_core::evolution::{conversion_period, dress_state, full_vs_effective, DeviationReport, Propagator};
use squeeze_core::hamiltonian::{build_effective, build_parametric, build_rwa, frohlich_generator, HamiltonianKind};
use squeeze_core::quantum::{
    embed_operator, expectation, expectation_and_variance, ladder_ops, make_state, number_op, LocalState,
    OperatorMatrix, SpaceDescriptor, StateVector, NMR, QUBIT, STLR,
};
use squeeze_core::table::{Cell, ResultTable};

use super::Ctx;
use crate::config::EvolveSpec;
use crate::error::{CliError, CliResult};
use crate::output::Meta;

pub const COLUMNS: [&str; 8] = [
    "t",
    "model",
    "exp_nb",
    "exp_na",
    "dx_over_x0",
    "dp_over_p0",
    "qubit_ground_pop",
    "leakage",
];

const MODELS: [&str; 3] = ["full-rwa", "pdc", "parametric"];

struct Probes {
    nb: OperatorMatrix,
    na: Option<OperatorMatrix>,
    x: OperatorMatrix,
    p: OperatorMatrix,
}

impl Probes {
    fn new(space: &SpaceDescriptor) -> CliResult<Self> {
        let d = space.dim_of(NMR)?;
        let (lo, hi) = ladder_ops(d)?;
        let b = embed_operator(&lo, NMR, space, false)?;
        let bd = embed_operator(&hi, NMR, space, false)?;
        let na = match space.dim_of(STLR) {
            Ok(da) => Some(embed_operator(&number_op(da)?, STLR, space, true)?),
            Err(_) => None,
        };
        Ok(Self {
            nb: embed_operator(&number_op(d)?, NMR, space, true)?,
            na,
            x: b.add(&bd)?.with_hermitian_hint(true),
            p: bd.sub(&b)?.scale(C64::new(0.0, 1.0)).with_hermitian_hint(true),
        })
    }

    fn row(&self, t: f64, model: &str, s: &StateVector) -> CliResult<Vec<Cell>> {
        let ground = match s.populations(QUBIT) {
            Ok(p) => Cell::from(p[0]),
            Err(_) => Cell::Empty,
        };
        let na = match &self.na {
            Some(op) => Cell::from(expectation(op, s)?.re),
            None => Cell::Empty,
        };
        Ok(vec![
            t.into(),
            Cell::from(model),
            expectation(&self.nb, s)?.re.into(),
            na,
            expectation_and_variance(&self.x, s)?.1.sqrt().into(),
            expectation_and_variance(&self.p, s)?.1.sqrt().into(),
            ground,
            s.max_leakage().1.into(),
        ])
    }
}

fn series(
    table: &mut ResultTable,
    model: &str,
    prop: &Propagator,
    mut state: StateVector,
    grid: &[f64],
) -> CliResult<()> {
    let probes = Probes::new(state.space())?;
    let mut t_prev = 0.0;
    for &t in grid {
        if t > t_prev {
            state = prop.evolve_at(&state, t - t_prev, t)?;
            t_prev = t;
        }
        table.push(probes.row(t, model, &state)?)?;
    }
    Ok(())
}

fn run_model(
    table: &mut ResultTable,
    model: &str,
    c: &DerivedCouplings,
    spec: &EvolveSpec,
    dims: (usize, usize),
    grid: &[f64],
) -> CliResult<()> {
    let (n_a, n_b) = dims;
    let init = [LocalState::Number(spec.init_n_a), LocalState::Number(spec.init_n_b)];
    match model {
        "full-rwa" => {
            let space = SpaceDescriptor::qubit_stlr_nmr(n_a, n_b)?;
            let bare = make_state(&space, &[LocalState::Basis(0), init[0], init[1]])?;
            let state = dress_state(&bare, &frohlich_generator(c, &space)?)?;
            series(table, model, &Propagator::new(&build_rwa(c, &space)?)?, state, grid)
        }
        "pdc" => {
            let space = SpaceDescriptor::stlr_nmr(n_a, n_b)?;
            let h = build_effective(c, &space, HamiltonianKind::Pdc)?;
            series(table, model, &Propagator::new(&h)?, make_state(&space, &init)?, grid)
        }
        "parametric" => {
            let space = SpaceDescriptor::nmr(n_b)?;
            let kappa = spec.kappa.unwrap_or(c.kappa);
            let h = build_parametric(kappa, spec.beta, spec.phi, 1.0, &space)?;
            let state = make_state(&space, &[init[1]])?;
            series(table, model, &Propagator::new(&h)?, state, grid)
        }
        other => Err(CliError::config(format!("unknown model `{other}`; expected one of {MODELS:?}"))),
    }
}

#[derive(Serialize)]
struct EvolveReport {
    meta: Meta,
    t_max: f64,
    conversion_period: f64,
    comparison: DeviationReport,
}

pub fn run(ctx: &Ctx, models: Option<&[String]>) -> CliResult<()> {
    let cfg = ctx.config()?;
    let c = cfg.scaled_couplings()?;
    let spec = cfg.evolve.clone().unwrap_or_default();
    let models: Vec<String> = models.map_or_else(|| spec.models.clone(), <[String]>::to_vec);
    if models.is_empty() {
        return Err(CliError::config("no models selected"));
    }
    if let Some(bad) = models.iter().find(|m| !MODELS.contains(&m.as_str())) {
        return Err(CliError::config(format!("unknown model `{bad}`; expected one of {MODELS:?}")));
    }
    if !(spec.beta > 0.0 && spec.beta.is_finite() && spec.phi.is_finite()) {
        return Err(CliError::config("`evolve.beta` must be finite and > 0, `evolve.phi` finite"));
    }
    let dims = cfg.spaces.map_or((10, 20), |s| (s.n_a, s.n_b));
    let only_parametric = models.iter().all(|m| m == "parametric");
    let t_max = match spec.t_max {
        Some(t) => t,
        None if only_parametric => 1.0 / (2.0 * spec.kappa.unwrap_or(c.kappa).abs() * spec.beta),
        None => conversion_period(&c),
    };
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::config("cannot pick t_max: kappa vanishes"));
    }
    let grid: Vec<f64> = (0..spec.points)
        .map(|k| t_max * k as f64 / (spec.points - 1) as f64)
        .collect();

    let mut table = ResultTable::new(&COLUMNS);
    for m in &models {
        run_model(&mut table, m, &c, &spec, dims, &grid)?;
    }
    let meta = ctx.meta("evolve");
    meta.stamp(&mut table);
    ctx.out.write_csv("timeseries.csv", &table)?;

    if models.iter().any(|m| m == "full-rwa") && models.iter().any(|m| m == "pdc") {
        let comparison = full_vs_effective(
            &c,
            dims.0,
            dims.1,
            (spec.init_n_a, spec.init_n_b),
            HamiltonianKind::Pdc,
            &grid,
        )?;
        ctx.out.write_json(
            "evolve_report.json",
            &EvolveReport {
                meta,
                t_max,
                conversion_period: conversion_period(&c),
                comparison,
            },
        )?;
    }
    Ok(())
}
