mod evolve;
mod fig2;
mod params;
mod sweep;
mod verify;

use crate::config::{self, Loaded, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Meta, OutDir};
use crate::{Cli, Command};

pub struct Ctx<'a> {
    pub cli: &'a Cli,
    pub loaded: Loaded,
    pub seed: u64,
    pub out: OutDir,
}

impl Ctx<'_> {
    pub fn config(&self) -> CliResult<&RunConfig> {
        self.loaded
            .config
            .as_ref()
            .ok_or_else(|| CliError::config("this command needs --config"))
    }

    pub fn meta(&self, command: &str) -> Meta {
        Meta::new(command, &self.loaded.digest, self.seed)
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let loaded = config::load(cli.config.as_deref())?;
    let seed = cli
        .seed
        .or_else(|| loaded.config.as_ref().and_then(|c| c.seed))
        .or_else(|| loaded.config.as_ref().and_then(|c| c.noise.as_ref()).map(|n| n.master_seed))
        .unwrap_or(0);
    let out = OutDir::create(&cli.out)?;
    let ctx = Ctx { cli, loaded, seed, out };
    match &cli.command {
        Command::Params => params::run(&ctx),
        Command::Verify { suite, xi, overlay } => verify::run(&ctx, *suite, xi.as_deref(), overlay.as_deref()),
        Command::Fig2 {
            ratios,
            xi_max,
            points,
            mc,
            trajectories,
            mc_xi_max,
        } => fig2::run(
            &ctx,
            &fig2::Fig2Args {
                ratios,
                xi_max: *xi_max,
                points: *points,
                mc: *mc,
                trajectories: *trajectories,
                mc_xi_max: *mc_xi_max,
            },
        ),
        Command::Evolve { models } => evolve::run(&ctx, models.as_deref()),
        Command::Sweep {
            param,
            from,
            to,
            steps,
            emit,
            hold_product,
        } => sweep::run(
            &ctx,
            &sweep::SweepArgs {
                param,
                from: *from,
                to: *to,
                steps: *steps,
                emit,
                hold_product: *hold_product,
            },
        ),
    }
}
