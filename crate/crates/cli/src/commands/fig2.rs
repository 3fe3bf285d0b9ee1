use serde::Serialize;
use squeeze_core::evolution::{phase_noise_ensemble, NoiseModel};
use squeeze_core::quantum::{make_state, LocalState, SpaceDescriptor};
use squeeze_core::squeezing::{calibrate_diffusion_factor, fig2_table, xi_grid, CurveMinimum};
use squeeze_core::table::Cell;

use super::Ctx;
use crate::error::{CliError, CliResult};
use crate::output::Meta;

pub struct Fig2Args<'a> {
    pub ratios: &'a Vec<f64>,
    pub xi_max: f64,
    pub points: usize,
    pub mc: bool,
    pub trajectories: usize,
    pub mc_xi_max: f64,
}

#[derive(Serialize)]
struct Minima {
    meta: Meta,
    minima: Vec<CurveMinimum>,
    /// Minimum value grows with `r` across the listed ratios.
    value_increasing: bool,
    /// Minimum location moves to smaller `ξ` as `r` grows.
    location_decreasing: bool,
    #[serde(rename = "c_D", skip_serializing_if = "Option::is_none")]
    c_d: Option<f64>,
}

fn monotone(minima: &[CurveMinimum], key: impl Fn(&CurveMinimum) -> f64, rising: bool) -> bool {
    let mut sorted: Vec<&CurveMinimum> = minima.iter().filter(|m| m.r > 0.0).collect();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r));
    sorted.windows(2).all(|w| {
        let (a, b) = (key(w[0]), key(w[1]));
        if rising {
            b > a
        } else {
            b < a
        }
    })
}

fn validate(args: &Fig2Args) -> CliResult<()> {
    if args.ratios.is_empty() {
        return Err(CliError::config("--ratios needs at least one value"));
    }
    if let Some(r) = args.ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(CliError::config(format!("ratio {r} must be finite and >= 0")));
    }
    if !(args.xi_max > 0.0 && args.xi_max.is_finite()) {
        return Err(CliError::config("--xi-max must be finite and > 0"));
    }
    if args.points < 3 {
        return Err(CliError::config("--points must be >= 3"));
    }
    if args.mc {
        if args.trajectories < 2 {
            return Err(CliError::config("--trajectories must be >= 2"));
        }
        if !(args.mc_xi_max > 0.0 && args.mc_xi_max <= args.xi_max) {
            return Err(CliError::config("--mc-xi-max must lie in (0, xi-max]"));
        }
    }
    Ok(())
}

pub fn run(ctx: &Ctx, args: &Fig2Args) -> CliResult<()> {
    validate(args)?;
    let grid = xi_grid(args.xi_max, args.points);
    let (mut table, minima) = fig2_table(args.ratios, &grid)?;

    let mut c_d = None;
    if args.mc {
        let cfg_noise = ctx.loaded.config.as_ref().and_then(|c| c.noise.clone());
        let factor = match &cfg_noise {
            Some(n) => n.diffusion_factor,
            None => calibrate_diffusion_factor(1.0, 0.01)?,
        };
        c_d = Some(factor);
        let dt = cfg_noise.as_ref().map_or(1e-3, |n| n.dt);
        let n_b = ctx.loaded.config.as_ref().and_then(|c| c.spaces).map_or(80, |s| s.n_b);
        let space = SpaceDescriptor::nmr(n_b)?;
        let vacuum = make_state(&space, &[LocalState::Number(0)])?;
        // MC times coincide with the analytic grid: G = 2κβ = 1, so t = ξ
        let m = grid.iter().take_while(|&&x| x <= args.mc_xi_max * (1.0 + 1e-12)).count();
        if m < 2 {
            return Err(CliError::config("--mc-xi-max leaves fewer than two grid points"));
        }
        let tau = grid[m - 1];
        for (k, &r) in args.ratios.iter().enumerate() {
            let noise = NoiseModel {
                linewidth: r,
                diffusion_factor: factor,
                beta: 1.0,
                phi0: std::f64::consts::FRAC_PI_2,
                n_traj: args.trajectories,
                dt,
                master_seed: ctx.seed,
            };
            let stats = phase_noise_ensemble(&noise, 0.5, &space, &vacuum, tau, m)?;
            let rows = &mut table.rows_mut()[k * grid.len()..k * grid.len() + m];
            for (i, row) in rows.iter_mut().enumerate() {
                row[3] = Cell::from(stats.dx[i]);
                row[4] = Cell::from(stats.dx_stderr[i]);
            }
        }
    }

    let meta = ctx.meta("fig2");
    meta.stamp(&mut table);
    if let Some(f) = c_d {
        table.set_meta("c_D", f.to_string());
    }
    ctx.out.write_csv("fig2.csv", &table)?;
    let report = Minima {
        meta,
        value_increasing: monotone(&minima, |m| m.dx_min, true),
        location_decreasing: monotone(&minima, |m| m.xi_star, false),
        minima,
        c_d,
    };
    ctx.out.write_json("fig2_minima.json", &report)?;
    Ok(())
}
