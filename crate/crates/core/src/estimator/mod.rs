//! Direct Monte Carlo and mixture importance sampling of
//! `P(sup |grad u| > b)`, with streaming statistics.

mod draw;
mod plan;
mod result;
mod runner;
mod stats;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use draw::{draw_is_sample, draw_mc_sample, IsDraw};
pub use plan::{direct_mc_relative_variance, required_sample_size};
pub(crate) use result::fmt_num;
pub use result::EstimatorResult;
pub use runner::{resolve_workers, stream, with_workers, Outcome, Tally, MAX_DISCARD_FRACTION, WORKERS_ENV};
pub use stats::Welford;

use crate::field::{CovarianceModel, Dimension, FieldFactor, Grid, DEFAULT_PIVOT_TOL};
use crate::level::{build_level_function, build_proposals, LevelFunction, LevelOptions, ProposalDensities, SigmaMode};
use crate::pde::{Boundary, Forcing, PdeProblem, PdeSolver};
use crate::rng::substream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "mc", alias = "direct_mc")]
    DirectMc,
    #[serde(rename = "is", alias = "importance_sampling")]
    ImportanceSampling,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DirectMc => "mc",
            Method::ImportanceSampling => "is",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" | "direct_mc" => Ok(Method::DirectMc),
            "is" | "importance_sampling" => Ok(Method::ImportanceSampling),
            _ => Err(Error::config("method", format!("expected `mc` or `is`, got `{s}`"))),
        }
    }
}

/// Everything one estimate needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub dim: Dimension,
    /// Nodes per axis, boundary included.
    pub nodes_per_axis: usize,
    pub model: CovarianceModel,
    pub forcing: Forcing,
    pub boundary: Boundary,
    pub threshold: f64,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub sigma_mode: SigmaMode,
    /// Solver settings; its boundary field is overridden by `boundary`.
    pub solver: PdeSolver,
    pub pivot_tol: f64,
    pub level: LevelOptions,
    /// Worker threads; `None` defers to the environment, then to all cores.
    pub workers: Option<usize>,
}

impl EstimatorConfig {
    /// The one-dimensional reference setup: 401 nodes, `R = 0.1`, `f = 1`.
    pub fn one_dimensional() -> Self {
        EstimatorConfig {
            dim: Dimension::One,
            nodes_per_axis: 401,
            model: CovarianceModel::squared_exponential(0.1),
            forcing: Forcing::Constant(1.0),
            boundary: Boundary::Dirichlet,
            threshold: 4.0,
            method: Method::ImportanceSampling,
            samples: 100_000,
            seed: 42,
            sigma_mode: SigmaMode::ReciprocalLevel,
            solver: PdeSolver::default_for(Dimension::One, Boundary::Dirichlet),
            pivot_tol: DEFAULT_PIVOT_TOL,
            level: LevelOptions::default(),
            workers: None,
        }
    }

    /// The two-dimensional reference setup: 25 x 25 nodes, `R = 0.6`, `f = 1`.
    pub fn two_dimensional() -> Self {
        EstimatorConfig {
            dim: Dimension::Two,
            nodes_per_axis: 25,
            model: CovarianceModel::squared_exponential(0.6),
            solver: PdeSolver::default_for(Dimension::Two, Boundary::Dirichlet),
            ..Self::one_dimensional()
        }
    }

    pub fn for_dim(dim: Dimension) -> Self {
        match dim {
            Dimension::One => Self::one_dimensional(),
            Dimension::Two => Self::two_dimensional(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(Error::config("b", format!("threshold must be positive and finite, got {}", self.threshold)));
        }
        if self.samples == 0 {
            return Err(Error::config("samples", "at least one sample is required"));
        }
        if !(self.model.correlation_length > 0.0) || !self.model.correlation_length.is_finite() {
            return Err(Error::config(
                "R",
                format!("correlation length must be positive, got {}", self.model.correlation_length),
            ));
        }
        if !(self.pivot_tol > 0.0 && self.pivot_tol < 1.0) {
            return Err(Error::config("pivot_tol", format!("must lie in (0, 1), got {}", self.pivot_tol)));
        }
        if let SigmaMode::Constant(s) = self.sigma_mode {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::config("sigma", format!("must be positive, got {s}")));
            }
        }
        if self.nodes_per_axis < 3 {
            return Err(Error::config("nodes", format!("need at least 3 nodes per axis, got {}", self.nodes_per_axis)));
        }
        Ok(())
    }
}

/// Factorized field and PDE problem, shared by every sample and threshold of
/// a configuration.
#[derive(Debug, Clone)]
pub struct Simulation {
    factor: FieldFactor,
    problem: PdeProblem,
}

impl Simulation {
    pub fn new(config: &EstimatorConfig) -> Result<Self> {
        let grid = Grid::build(config.dim, config.nodes_per_axis)?;
        let solver = PdeSolver { boundary: config.boundary, ..config.solver };
        let problem = PdeProblem::new(grid.clone(), config.forcing.clone(), solver)?;
        let factor = FieldFactor::factorize(&grid, &config.model, config.pivot_tol)?;
        Ok(Simulation { factor, problem })
    }

    pub fn from_parts(factor: FieldFactor, problem: PdeProblem) -> Result<Self> {
        if factor.grid() != crate::pde::StrainResponse::grid(&problem) {
            return Err(Error::config("grid", "factor and PDE problem live on different grids"));
        }
        Ok(Simulation { factor, problem })
    }

    pub fn grid(&self) -> &Grid {
        self.factor.grid()
    }

    pub fn factor(&self) -> &FieldFactor {
        &self.factor
    }

    pub fn problem(&self) -> &PdeProblem {
        &self.problem
    }

    pub fn level_function(&self, b: f64, opts: &LevelOptions) -> Result<LevelFunction> {
        build_level_function(b, self.factor.model(), &self.problem, opts)
    }

    pub fn proposals(&self, levels: &LevelFunction, mode: SigmaMode) -> Result<ProposalDensities> {
        build_proposals(levels, self.grid(), mode)
    }

    /// Direct Monte Carlo with `n` samples on substreams `(seed, 0..n)`.
    pub fn run_direct_mc(&self, b: f64, n: u64, seed: u64) -> Result<EstimatorResult> {
        let start = Instant::now();
        let tally = stream(n, |i| {
            let mut rng = substream(seed, i);
            Ok(draw_mc_sample(b, &self.factor, &self.problem, &mut rng)?.map(|hit| (hit as u8 as f64, hit)))
        })?;
        Ok(EstimatorResult::from_tally(Method::DirectMc, b, n, seed, &tally, start.elapsed().as_secs_f64()))
    }

    /// Importance sampling with given proposals.
    pub fn run_importance_sampling(
        &self,
        b: f64,
        proposals: &ProposalDensities,
        n: u64,
        seed: u64,
    ) -> Result<EstimatorResult> {
        if proposals.len() != self.grid().len() {
            return Err(Error::config("proposal", "proposals do not match the grid"));
        }
        let start = Instant::now();
        let tally = stream(n, |i| {
            let mut rng = substream(seed, i);
            Ok(draw_is_sample(b, &self.factor, proposals, &self.problem, &mut rng)?.map(|d| (d.z, d.indicator)))
        })?;
        Ok(EstimatorResult::from_tally(Method::ImportanceSampling, b, n, seed, &tally, start.elapsed().as_secs_f64()))
    }

    /// Builds the level function and proposals for `b`, then samples.
    pub fn run_importance_sampling_for(
        &self,
        b: f64,
        opts: &LevelOptions,
        mode: SigmaMode,
        n: u64,
        seed: u64,
    ) -> Result<EstimatorResult> {
        let start = Instant::now();
        let levels = self.level_function(b, opts)?;
        let proposals = self.proposals(&levels, mode)?;
        let mut r = self.run_importance_sampling(b, &proposals, n, seed)?;
        r.wall_time_s = start.elapsed().as_secs_f64();
        Ok(r)
    }
}

/// Runs one estimate end to end, on the configured worker pool.
pub fn run(config: &EstimatorConfig) -> Result<EstimatorResult> {
    config.validate()?;
    with_workers(config.workers, || {
        let start = Instant::now();
        let sim = Simulation::new(config)?;
        let mut r = match config.method {
            Method::DirectMc => sim.run_direct_mc(config.threshold, config.samples, config.seed)?,
            Method::ImportanceSampling => sim.run_importance_sampling_for(
                config.threshold,
                &config.level,
                config.sigma_mode,
                config.samples,
                config.seed,
            )?,
        };
        r.wall_time_s = start.elapsed().as_secs_f64();
        Ok(r)
    })
}

#[cfg(test)]
mod tests;
