use serde::{Deserialize, Serialize};

use crate::field::{conditional_mean, CovarianceModel};
use crate::pde::StrainResponse;
use crate::{Error, Result};

/// Knobs of the level iteration and of the anchor grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Lower clamp applied to anchor levels.
    pub floor: f64,
    /// Anchors per axis when no explicit stride is given.
    pub anchors_per_axis: usize,
    pub coarse_stride: Option<usize>,
}

impl Default for LevelOptions {
    fn default() -> Self {
        LevelOptions { max_iter: 3, tol: 1e-3, floor: 0.5, anchors_per_axis: 20, coarse_stride: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub iterations: usize,
    /// Last step size `|l(n+1) - l(n)|`.
    pub residual: f64,
    pub converged: bool,
    /// Some iterate left `(0, 100]`.
    pub diverged: bool,
    /// The floor was applied to this level.
    pub clamped: bool,
    /// Level before clamping.
    pub raw_level: f64,
}

/// Upper bound of the admissible level range.
const LEVEL_CEILING: f64 = 100.0;

/// Smallest height `l` such that the mean field `l C(. - x0)` drives the
/// strain supremum to `b`, by the fixed-point iteration
/// `l <- l - log sup|grad u(l)| + log b` started from `log b`.
///
/// Returns the last iterate; non-convergence within `max_iter` steps is only
/// recorded in the diagnostics.
pub fn find_level(
    x0: usize,
    b: f64,
    model: &CovarianceModel,
    response: &dyn StrainResponse,
    opts: &LevelOptions,
) -> Result<(f64, LevelDiagnostics)> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::config("b", format!("threshold must be positive, got {b}")));
    }
    let log_b = b.ln();
    let grid = response.grid();
    let mut level = log_b;
    let mut diag = LevelDiagnostics { residual: f64::INFINITY, ..Default::default() };
    for _ in 0..opts.max_iter {
        let xi = conditional_mean(model, grid, x0, level);
        let strain = response.strain_sup(&xi.values)?;
        if !(strain > 0.0) || !strain.is_finite() {
            diag.diverged = true;
            break;
        }
        let next = level - strain.ln() + log_b;
        diag.iterations += 1;
        diag.residual = (next - level).abs();
        level = next;
        if !(level > 0.0 && level <= LEVEL_CEILING) {
            diag.diverged = true;
            break;
        }
        if diag.residual < opts.tol {
            diag.converged = true;
            break;
        }
    }
    if !level.is_finite() {
        return Err(Error::DegenerateLevel { node: x0, level });
    }
    diag.raw_level = level;
    Ok((level, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::pde::{Boundary, Forcing, PdeProblem, PdeSolver};

    /// `sup |grad u| = exp(max xi)`.
    struct Exponential(Grid);

    impl StrainResponse for Exponential {
        fn grid(&self) -> &Grid {
            &self.0
        }
        fn strain_sup(&self, xi: &[f64]) -> Result<f64> {
            Ok(xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp())
        }
    }

    fn problem_1d() -> PdeProblem {
        let grid = Grid::line(401).unwrap();
        let solver = PdeSolver::default_for(grid.dim(), Boundary::Dirichlet);
        PdeProblem::new(grid, Forcing::Constant(1.0), solver).unwrap()
    }

    #[test]
    fn synthetic_fixed_point_in_one_step() {
        let r = Exponential(Grid::line(21).unwrap());
        let model = CovarianceModel::squared_exponential(0.1);
        let (l, d) = find_level(10, 32.0, &model, &r, &LevelOptions::default()).unwrap();
        assert!((l - 32f64.ln()).abs() < 1e-12);
        assert_eq!(d.iterations, 1);
        assert!(d.converged && !d.diverged);
    }

    #[test]
    fn level_reproduces_threshold() {
        let p = problem_1d();
        let model = CovarianceModel::squared_exponential(0.1);
        let opts = LevelOptions { max_iter: 10, ..Default::default() };
        let b = 32.0;
        let (l, d) = find_level(200, b, &model, &p, &opts).unwrap();
        assert!(d.converged, "{d:?}");
        let s = p.strain_sup(&conditional_mean(&model, p.grid(), 200, l).values).unwrap();
        assert!((s / b - 1.0).abs() <= 2.0 * opts.tol, "strain {s}");
    }

    #[test]
    fn higher_threshold_needs_higher_level() {
        let p = problem_1d();
        let model = CovarianceModel::squared_exponential(0.1);
        for x0 in [0, 40, 200, 380, 400] {
            let (l4, _) = find_level(x0, 4.0, &model, &p, &LevelOptions::default()).unwrap();
            let (l32, _) = find_level(x0, 32.0, &model, &p, &LevelOptions::default()).unwrap();
            assert!(l32 > l4, "x0 = {x0}: {l32} <= {l4}");
        }
    }

    #[test]
    fn non_positive_threshold_rejected() {
        let p = problem_1d();
        let model = CovarianceModel::squared_exponential(0.1);
        assert!(find_level(3, 0.0, &model, &p, &LevelOptions::default()).is_err());
    }

    #[test]
    fn iteration_cap_is_respected() {
        let p = problem_1d();
        let model = CovarianceModel::squared_exponential(0.1);
        let opts = LevelOptions { max_iter: 1, tol: 1e-14, ..Default::default() };
        let (_, d) = find_level(200, 16.0, &model, &p, &opts).unwrap();
        assert_eq!(d.iterations, 1);
        assert!(!d.converged);
    }
}
