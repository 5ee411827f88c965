use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::estimator::{EstimatorConfig, EstimatorResult, Method, Simulation};
use crate::field::Dimension;
use crate::pde::{Boundary, Forcing, PdeSolver};
use crate::{CovarianceModel, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableId {
    /// 1D, `R = 0.1`, 401 nodes, `f = 1`, Dirichlet.
    OneDim,
    /// 2D, `R = 0.6`, 25 x 25 nodes, `f = 1`.
    TwoDimCoarse,
    /// 2D, `R = 0.6`, 50 x 50 nodes, `f = 1`.
    TwoDimFine,
    /// 2D, `R = 0.2`, 75 x 75 nodes by default, `f = 1`.
    TwoDimShortCorrelation,
    /// 1D periodic, `R = 0.2`, 401 nodes, quadratic zero-mean force.
    Periodic,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::OneDim,
        TableId::TwoDimCoarse,
        TableId::TwoDimFine,
        TableId::TwoDimShortCorrelation,
        TableId::Periodic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::OneDim => "T1_1d",
            TableId::TwoDimCoarse => "T2a_2d25",
            TableId::TwoDimFine => "T2b_2d50",
            TableId::TwoDimShortCorrelation => "T4_2dR02",
            TableId::Periodic => "T5_periodic",
        }
    }

    pub fn thresholds(self) -> &'static [f64] {
        match self {
            TableId::OneDim => &[2.0, 4.0, 8.0, 16.0, 32.0],
            TableId::Periodic => &[1.0, 2.0, 4.0, 8.0, 12.0],
            _ => &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
        }
    }

    /// Estimator settings of the table, with sample count and seed left at
    /// their defaults.
    pub fn config(self) -> EstimatorConfig {
        match self {
            TableId::OneDim => EstimatorConfig::one_dimensional(),
            TableId::TwoDimCoarse => EstimatorConfig::two_dimensional(),
            TableId::TwoDimFine => {
                EstimatorConfig { nodes_per_axis: 50, pivot_tol: 1e-8, ..EstimatorConfig::two_dimensional() }
            }
            TableId::TwoDimShortCorrelation => EstimatorConfig {
                nodes_per_axis: 75,
                model: CovarianceModel::squared_exponential(0.2),
                pivot_tol: 1e-8,
                ..EstimatorConfig::two_dimensional()
            },
            TableId::Periodic => EstimatorConfig {
                model: CovarianceModel::periodic(0.2),
                forcing: Forcing::Quadratic,
                boundary: Boundary::Periodic,
                solver: PdeSolver::default_for(Dimension::One, Boundary::Periodic),
                ..EstimatorConfig::one_dimensional()
            },
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL.into_iter().find(|t| t.as_str().eq_ignore_ascii_case(s)).ok_or_else(|| {
            let names: Vec<&str> = TableId::ALL.iter().map(|t| t.as_str()).collect();
            Error::config("table", format!("unknown table `{s}`, expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableOptions {
    pub samples: u64,
    pub seed: u64,
    /// Overrides the table's mesh.
    pub nodes_per_axis: Option<usize>,
    /// Overrides the table's threshold grid.
    pub thresholds: Option<Vec<f64>>,
    /// Direct Monte Carlo is skipped above this threshold.
    pub mc_max_b: Option<f64>,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { samples: 100_000, seed: 42, nodes_per_axis: None, thresholds: None, mc_max_b: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub b: f64,
    pub mc: Option<EstimatorResult>,
    pub is: EstimatorResult,
}

impl TableRow {
    pub const CSV_HEADER: &'static str = "b,p_mc,p_is,std_mc,std_is,rel_err_mc,rel_err_is,mc_zero_hits";

    pub fn csv_row(&self) -> String {
        let f = crate::estimator::fmt_num;
        let (p, s, r, z) = match &self.mc {
            Some(mc) => (f(mc.p_hat), f(mc.std), f(mc.rel_err), mc.zero_hit_convention.to_string()),
            None => (String::new(), String::new(), String::new(), String::new()),
        };
        format!("{},{p},{},{s},{},{r},{},{z}", f(self.b), f(self.is.p_hat), f(self.is.std), f(self.is.rel_err))
    }
}

/// Runs both estimators for every threshold of `table`. Direct Monte Carlo
/// uses `seed`, importance sampling `seed + 1`; zero-hit Monte Carlo rows
/// report `sqrt(1/p - 1)` at the importance sampling estimate.
pub fn reproduce_table(table: TableId, options: &TableOptions) -> Result<Vec<TableRow>> {
    let mut config = table.config();
    if let Some(n) = options.nodes_per_axis {
        config.nodes_per_axis = n;
    }
    config.samples = options.samples;
    config.seed = options.seed;
    let thresholds = options.thresholds.clone().unwrap_or_else(|| table.thresholds().to_vec());
    run_table(&config, &thresholds, options.mc_max_b)
}

/// Table rows for an arbitrary configuration; its threshold, method and
/// sigma mode fields are replaced per cell.
pub fn run_table(config: &EstimatorConfig, thresholds: &[f64], mc_max_b: Option<f64>) -> Result<Vec<TableRow>> {
    config.validate()?;
    crate::estimator::with_workers(config.workers, || run_cells(config, thresholds, mc_max_b))
}

fn run_cells(config: &EstimatorConfig, thresholds: &[f64], mc_max_b: Option<f64>) -> Result<Vec<TableRow>> {
    if thresholds.is_empty() || thresholds.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::config("b", "thresholds must be positive"));
    }
    let sim = Simulation::new(config)?;
    let is_seed = config.seed.wrapping_add(1);

    let cells: Vec<(usize, Method)> = (0..thresholds.len())
        .flat_map(|k| [(k, Method::ImportanceSampling), (k, Method::DirectMc)])
        .filter(|&(k, m)| m == Method::ImportanceSampling || mc_max_b.is_none_or(|max| thresholds[k] <= max))
        .collect();
    let results: Vec<EstimatorResult> = cells
        .par_iter()
        .map(|&(k, m)| match m {
            Method::DirectMc => sim.run_direct_mc(thresholds[k], config.samples, config.seed),
            Method::ImportanceSampling => sim.run_importance_sampling_for(
                thresholds[k],
                &config.level,
                config.sigma_mode,
                config.samples,
                is_seed,
            ),
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<TableRow> = Vec::with_capacity(thresholds.len());
    for ((k, m), r) in cells.into_iter().zip(results) {
        match m {
            Method::ImportanceSampling => rows.push(TableRow { b: thresholds[k], mc: None, is: r }),
            Method::DirectMc => {
                let row = rows.last_mut().expect("importance sampling cell precedes its Monte Carlo cell");
                row.mc = Some(r.with_reference_probability(row.is.p_hat));
            }
        }
    }
    Ok(rows)
}
