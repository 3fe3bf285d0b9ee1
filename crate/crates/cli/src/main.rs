//! `nmr-squeeze`: device parameters, verification suites, noisy-squeezing
//! curves, dynamics and parameter sweeps.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical or
//! validation failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::EXIT_CONFIG;

#[derive(Debug, Parser)]
#[command(name = "nmr-squeeze", version, about = "Charge-qubit mediated mechanical squeezing simulator")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "PATH", default_value = ".")]
    pub out: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Treat failed regime checks as errors.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Permit n_g = 1/2, where the mechanical coupling vanishes.
    #[arg(long, global = true)]
    pub allow_degenerate: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Frohlich,
    Rwa,
    Bogoliubov,
    SqueezeLaw,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived couplings and regime checks -> params.json
    Params,
    /// Run a verification suite -> report.json
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Squeeze parameters for the bogoliubov and squeeze-law suites.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        xi: Option<Vec<f64>>,
        /// Earlier output whose config digest must match this run.
        #[arg(long, value_name = "PATH")]
        overlay: Option<PathBuf>,
    },
    /// Noisy-squeezing curves -> fig2.csv, fig2_minima.json
    Fig2 {
        #[arg(long, value_delimiter = ',', default_value = "0,0.001,0.01,0.05", allow_negative_numbers = true)]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        xi_max: f64,
        #[arg(long, default_value_t = 301)]
        points: usize,
        /// Fill the Monte Carlo columns.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 2000)]
        trajectories: usize,
        /// Largest ξ sampled by the Monte Carlo.
        #[arg(long, default_value_t = 1.0)]
        mc_xi_max: f64,
    },
    /// Time series of the configured models -> timeseries.csv
    Evolve {
        /// Overrides `evolve.models`.
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
    },
    /// Sweep one device parameter -> sweep.csv
    Sweep {
        /// Device field name, e.g. n_g, B, EJ_over_h.
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of points, endpoints included.
        #[arg(long)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "kappa")]
        emit: Vec<String>,
        /// Keep B·W fixed while sweeping B or W.
        #[arg(long)]
        hold_product: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
