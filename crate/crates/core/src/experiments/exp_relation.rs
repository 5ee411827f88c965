use serde::{Deserialize, Serialize};

use super::fit_line;
use crate::estimator::Simulation;
use crate::field::{conditional_mean, sample_conditional, CovarianceModel, FieldFactor};
use crate::pde::StrainResponse;
use crate::rng::auxiliary;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpMode {
    /// `xi = l C(. - x*)`, abscissa `l`.
    Deterministic,
    /// One conditional path per level with `xi(x*) = l`, abscissa `max xi`.
    Stochastic,
}

/// Fit of `log sup|grad u|` against the field height.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpRelationFit {
    pub mode: ExpMode,
    pub probe: usize,
    /// `(abscissa, log strain_sup)` in level order.
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// `kappa` and `alpha` of `log s = log kappa + alpha log l + l`.
    pub kappa: f64,
    pub alpha: f64,
}

impl ExpRelationFit {
    pub fn csv(&self) -> String {
        let mut out = String::from("abscissa,log_strain_sup\n");
        for (x, y) in &self.pairs {
            out.push_str(&format!("{x:e},{y:e}\n"));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "mode = {}\nprobe = {}\nslope = {:e}\nintercept = {:e}\nkappa = {:e}\nalpha = {:e}\n",
            match self.mode {
                ExpMode::Deterministic => "deterministic",
                ExpMode::Stochastic => "stochastic",
            },
            self.probe,
            self.slope,
            self.intercept,
            self.kappa,
            self.alpha
        )
    }
}

/// Runs the verification on a prepared simulation.
pub fn verify_exp_relation(
    sim: &Simulation,
    mode: ExpMode,
    probe: usize,
    levels: &[f64],
    seed: u64,
) -> Result<ExpRelationFit> {
    fit_exp_relation(mode, probe, levels, sim.factor().model(), sim.problem(), Some(sim.factor()), seed)
}

/// Same as [`verify_exp_relation`] against any response. The stochastic mode
/// needs `factor`.
pub fn fit_exp_relation(
    mode: ExpMode,
    probe: usize,
    levels: &[f64],
    model: &CovarianceModel,
    response: &dyn StrainResponse,
    factor: Option<&FieldFactor>,
    seed: u64,
) -> Result<ExpRelationFit> {
    let grid = response.grid();
    if probe >= grid.len() {
        return Err(Error::config("probe", format!("node {probe} outside a grid of {} nodes", grid.len())));
    }
    if levels.len() < 2 || levels.windows(2).any(|w| !(w[0] < w[1])) || !(levels[0] > 0.0) {
        return Err(Error::config("levels", "need at least two positive, strictly increasing levels"));
    }
    let mut pairs = Vec::with_capacity(levels.len());
    for (k, &l) in levels.iter().enumerate() {
        let (x, xi) = match mode {
            ExpMode::Deterministic => (l, conditional_mean(model, grid, probe, l).values),
            ExpMode::Stochastic => {
                let factor = factor.ok_or_else(|| Error::config("mode", "stochastic mode needs a field factor"))?;
                let s = sample_conditional(factor, probe, l, &mut auxiliary(seed, k as u64));
                (s.max(), s.values)
            }
        };
        let strain = response.strain_sup(&xi)?;
        if !(strain > 0.0) || !strain.is_finite() {
            return Err(Error::config("levels", format!("strain supremum {strain} at level {l} has no logarithm")));
        }
        pairs.push((x, strain.ln()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
    let (slope, intercept) = fit_line(&xs, &ys);
    let log_l: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let excess: Vec<f64> = pairs.iter().map(|(x, y)| y - x).collect();
    let (alpha, log_kappa) = fit_line(&log_l, &excess);
    Ok(ExpRelationFit { mode, probe, pairs, slope, intercept, kappa: log_kappa.exp(), alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;

    struct PeakExp(Grid);

    impl StrainResponse for PeakExp {
        fn grid(&self) -> &Grid {
            &self.0
        }

        fn strain_sup(&self, xi: &[f64]) -> Result<f64> {
            Ok(xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp())
        }
    }

    #[test]
    fn synthetic_exponential_response() {
        let grid = Grid::square(9).unwrap();
        let model = CovarianceModel::squared_exponential(0.6);
        let levels: Vec<f64> = (2..=8).map(f64::from).collect();
        let fit = fit_exp_relation(ExpMode::Deterministic, grid.index(4, 4), &levels, &model, &PeakExp(grid), None, 0)
            .unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert!((fit.kappa - 1.0).abs() < 1e-12);
        assert!(fit.alpha.abs() < 1e-12);
    }

    #[test]
    fn power_law_prefactor_is_recovered() {
        struct Scaled(Grid);
        impl StrainResponse for Scaled {
            fn grid(&self) -> &Grid {
                &self.0
            }
            fn strain_sup(&self, xi: &[f64]) -> Result<f64> {
                let m = xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Ok(0.3 * m.powf(-0.5) * m.exp())
            }
        }
        let grid = Grid::line(11).unwrap();
        let model = CovarianceModel::squared_exponential(0.3);
        let fit =
            fit_exp_relation(ExpMode::Deterministic, 5, &[2.0, 3.0, 5.0, 8.0], &model, &Scaled(grid), None, 0).unwrap();
        assert!((fit.kappa - 0.3).abs() < 1e-12);
        assert!((fit.alpha + 0.5).abs() < 1e-12);
    }

    #[test]
    fn stochastic_mode_needs_factor_and_uses_max() {
        let grid = Grid::line(21).unwrap();
        let model = CovarianceModel::squared_exponential(0.3);
        let r = fit_exp_relation(ExpMode::Stochastic, 10, &[2.0, 3.0], &model, &PeakExp(grid.clone()), None, 0);
        assert!(r.is_err());
        let factor = FieldFactor::factorize(&grid, &model, 1e-12).unwrap();
        let fit = fit_exp_relation(ExpMode::Stochastic, 10, &[2.0, 3.0, 4.0], &model, &PeakExp(grid), Some(&factor), 3)
            .unwrap();
        for ((x, y), l) in fit.pairs.iter().zip([2.0, 3.0, 4.0]) {
            assert!(*x >= l);
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_levels() {
        let grid = Grid::line(5).unwrap();
        let model = CovarianceModel::squared_exponential(0.3);
        let resp = PeakExp(grid);
        assert!(fit_exp_relation(ExpMode::Deterministic, 2, &[3.0, 2.0], &model, &resp, None, 0).is_err());
        assert!(fit_exp_relation(ExpMode::Deterministic, 9, &[2.0, 3.0], &model, &resp, None, 0).is_err());
    }
}
