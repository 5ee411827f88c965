//! Reproduction studies built on the estimator.

mod exp_relation;
mod level_map;
mod sigma_sweep;
mod tables;
mod tail_fit;

pub use exp_relation::{fit_exp_relation, verify_exp_relation, ExpMode, ExpRelationFit};
pub use level_map::{level_map_csv, write_level_map};
pub use sigma_sweep::{sigma_sweep, SigmaSweep, SigmaSweepRow, DEFAULT_SIGMAS};
pub use tables::{reproduce_table, run_table, TableId, TableOptions, TableRow};
pub use tail_fit::{fit_tail, TailFit, TailRow, MAX_TAIL_REL_ERR};

/// Ordinary least squares line `y = slope x + intercept`.
pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
