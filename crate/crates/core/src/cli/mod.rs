//! Command-line front end.
//!
//! Settings resolve in three layers: built-in defaults, then an optional
//! TOML file given with `--config`, then command-line flags. Every output
//! starts with `#` comment lines holding the resolved configuration and the
//! master seed.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigOverlay, RunConfig};
pub use output::{header, write_atomic};

use crate::Result;
use config::parse_keyword;

#[derive(Debug, Parser)]
#[command(
    name = "failprob",
    version,
    about = "Strain failure probabilities for elliptic PDEs with lognormal coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one failure probability.
    #[command(allow_negative_numbers = true)]
    Estimate(CommonArgs),
    /// Run both estimators over the thresholds of a reference table.
    #[command(allow_negative_numbers = true)]
    Table(TableArgs),
    /// Export the excursion level function as CSV.
    #[command(allow_negative_numbers = true)]
    LevelMap(CommonArgs),
    /// Fit log strain against the field height at a probe point.
    #[command(allow_negative_numbers = true)]
    VerifyExp(VerifyExpArgs),
    /// Importance sampling with a sweep of constant proposal deviations.
    #[command(allow_negative_numbers = true)]
    SigmaSweep(SigmaSweepArgs),
    /// Quadratic fit of log p against log b from a results CSV.
    #[command(allow_negative_numbers = true)]
    FitTail(FitTailArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Strain threshold.
    #[arg(long = "b")]
    pub b: Option<f64>,
    /// Correlation length.
    #[arg(long = "R")]
    pub correlation_length: Option<f64>,
    /// squared_exponential or periodic_extension.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Nodes per axis, boundary included.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// constant, step or quadratic.
    #[arg(long)]
    pub force: Option<String>,
    #[arg(long)]
    pub force_value: Option<f64>,
    /// dirichlet or periodic.
    #[arg(long)]
    pub bc: Option<String>,
    /// mc or is.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Constant proposal deviation instead of 1/l.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub pivot_tol: Option<f64>,
    /// Anchor spacing of the level function in nodes.
    #[arg(long)]
    pub coarse_stride: Option<usize>,
    #[arg(long)]
    pub anchors_per_axis: Option<usize>,
    #[arg(long)]
    pub level_max_iter: Option<usize>,
    #[arg(long)]
    pub level_tol: Option<f64>,
    #[arg(long)]
    pub level_floor: Option<f64>,
    /// closed_form or finite_volume.
    #[arg(long)]
    pub solver: Option<String>,
    /// banded_cholesky or conjugate_gradient.
    #[arg(long)]
    pub linear_solver: Option<String>,
    /// geometric or harmonic.
    #[arg(long)]
    pub face_average: Option<String>,
    #[arg(long)]
    pub cg_tol: Option<f64>,
    #[arg(long)]
    pub cg_cap_factor: Option<usize>,
    /// Worker threads (also FAILPROB_WORKERS).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Fill the wall_time_s column.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// T1_1d, T2a_2d25, T2b_2d50, T4_2dR02 or T5_periodic.
    #[arg(long)]
    pub table: Option<String>,
    /// Comma-separated thresholds replacing the table's grid.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// Skip direct Monte Carlo above this threshold.
    #[arg(long)]
    pub mc_max_b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyExpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// deterministic or stochastic.
    #[arg(long)]
    pub mode: Option<String>,
    /// Probe coordinates, comma-separated; the domain center by default.
    #[arg(long, value_delimiter = ',')]
    pub probe: Option<Vec<f64>>,
    /// Comma-separated increasing levels.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct SigmaSweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated proposal deviations.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct FitTailArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV written by `table` or `estimate`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

impl CommonArgs {
    fn overlay(&self) -> Result<ConfigOverlay> {
        Ok(ConfigOverlay {
            dim: self.dim,
            b: self.b,
            correlation_length: self.correlation_length,
            kernel: self.kernel.as_deref().map(|s| parse_keyword("kernel", s)).transpose()?,
            nodes: self.nodes,
            force: self.force.clone(),
            force_value: self.force_value,
            bc: self.bc.as_deref().map(|s| parse_keyword("bc", s)).transpose()?,
            method: self.method.as_deref().map(|s| parse_keyword("method", s)).transpose()?,
            samples: self.samples,
            seed: self.seed,
            sigma: self.sigma,
            pivot_tol: self.pivot_tol,
            coarse_stride: self.coarse_stride,
            anchors_per_axis: self.anchors_per_axis,
            level_max_iter: self.level_max_iter,
            level_tol: self.level_tol,
            level_floor: self.level_floor,
            solver: self.solver.as_deref().map(|s| parse_keyword("solver", s)).transpose()?,
            linear_solver: self.linear_solver.as_deref().map(|s| parse_keyword("linear_solver", s)).transpose()?,
            face_average: self.face_average.as_deref().map(|s| parse_keyword("face_average", s)).transpose()?,
            cg_tol: self.cg_tol,
            cg_cap_factor: self.cg_cap_factor,
            workers: self.workers,
            output: self.output.clone(),
            timing: self.timing.then_some(true),
            ..Default::default()
        })
    }

    /// The config file overlaid with the flags and `extra`.
    pub fn layers(&self, extra: ConfigOverlay) -> Result<ConfigOverlay> {
        let file = match &self.config {
            Some(path) => ConfigOverlay::from_file(path)?,
            None => ConfigOverlay::default(),
        };
        Ok(file.merge(self.overlay()?.merge(extra)))
    }

    /// Defaults, then the config file, then the flags.
    pub fn resolve_with(&self, extra: ConfigOverlay) -> Result<RunConfig> {
        self.layers(extra)?.resolve()
    }
}

/// Parses `args` and runs the selected subcommand. Help and version requests
/// print and exit.
pub fn run_from_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    run(cli.command)
}

pub fn run(command: Command) -> Result<()> {
    commands::dispatch(command)
}
