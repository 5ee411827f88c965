use crate::estimator::{EstimatorResult, Simulation};
use crate::level::{LevelOptions, SigmaMode};
use crate::{Error, Result};

pub const DEFAULT_SIGMAS: [f64; 7] = [0.02, 0.1, 0.2, 0.3, 0.5, 1.0, 5.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSweepRow {
    pub sigma: f64,
    pub result: EstimatorResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSweep {
    pub b: f64,
    pub rows: Vec<SigmaSweepRow>,
    /// Index into `rows` of the smallest one-sample standard deviation.
    pub argmin: usize,
    /// Range of `1 / l_x` over the grid.
    pub inverse_level_range: (f64, f64),
}

impl SigmaSweep {
    pub fn best_sigma(&self) -> f64 {
        self.rows[self.argmin].sigma
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("sigma,b,p_hat,std,rel_err,n,hits\n");
        for r in &self.rows {
            let e = &r.result;
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{},{}\n",
                r.sigma, self.b, e.p_hat, e.std, e.rel_err, e.n, e.hits
            ));
        }
        out
    }
}

/// Importance sampling at threshold `b` with each constant `sigma`, sharing
/// one level function. Every value uses the same sample streams.
pub fn sigma_sweep(
    sim: &Simulation,
    b: f64,
    sigmas: &[f64],
    opts: &LevelOptions,
    samples: u64,
    seed: u64,
) -> Result<SigmaSweep> {
    if sigmas.is_empty() {
        return Err(Error::config("sigmas", "at least one value is required"));
    }
    let levels = sim.level_function(b, opts)?;
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let proposals = sim.proposals(&levels, SigmaMode::Constant(sigma))?;
        let result = sim.run_importance_sampling(b, &proposals, samples, seed)?;
        rows.push(SigmaSweepRow { sigma, result });
    }
    let argmin =
        rows.iter().enumerate().min_by(|a, b| a.1.result.std.total_cmp(&b.1.result.std)).map(|(k, _)| k).unwrap();
    Ok(SigmaSweep { b, rows, argmin, inverse_level_range: (1.0 / levels.max(), 1.0 / levels.min()) })
}
