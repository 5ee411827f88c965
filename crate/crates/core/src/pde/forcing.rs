use serde::{Deserialize, Serialize};

use crate::field::{Dimension, Grid};
use crate::{Error, Result};

/// Body force `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Forcing {
    Constant(f64),
    /// `+1` for `x1 <= 1/2`, `-1` otherwise.
    Step,
    /// `10 (x1 - 1/2)^2 - 5/6`, zero mean on `[0,1]`.
    Quadratic,
    /// Nodal values in grid order.
    Tabulated(Vec<f64>),
}

impl Forcing {
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match self {
            Forcing::Constant(c) => *c,
            Forcing::Step => {
                if x[0] <= 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            Forcing::Quadratic => 10.0 * (x[0] - 0.5).powi(2) - 5.0 / 6.0,
            Forcing::Tabulated(_) => f64::NAN,
        }
    }

    pub fn nodal(&self, grid: &Grid) -> Result<Vec<f64>> {
        let values = match self {
            Forcing::Tabulated(v) => {
                if v.len() != grid.len() {
                    return Err(Error::config(
                        "force",
                        format!("tabulated forcing has {} values for {} nodes", v.len(), grid.len()),
                    ));
                }
                v.clone()
            }
            _ => (0..grid.len()).map(|k| self.eval(grid.point(k))).collect(),
        };
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::config("force", format!("non-finite value at node {k}")));
        }
        Ok(values)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Forcing::Constant(_) => "constant",
            Forcing::Step => "step",
            Forcing::Quadratic => "quadratic",
            Forcing::Tabulated(_) => "tabulated",
        }
    }
}

/// Integral of nodal values over the grid: composite Simpson per axis when the
/// interval count is even (exact for cubics), trapezoid otherwise.
pub(crate) fn integrate(grid: &Grid, values: &[f64]) -> f64 {
    let w = axis_weights(grid.nodes_per_axis());
    match grid.dim() {
        Dimension::One => values.iter().zip(&w).map(|(v, w)| v * w).sum(),
        Dimension::Two => {
            let n = grid.nodes_per_axis();
            let mut s = 0.0;
            for j in 0..n {
                for i in 0..n {
                    s += w[i] * w[j] * values[grid.index(i, j)];
                }
            }
            s
        }
    }
}

fn axis_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let intervals = n - 1;
    if intervals.is_multiple_of(2) {
        (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect()
    } else {
        (0..n).map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h }).collect()
    }
}

pub(crate) const PERIODIC_SOLVABILITY_TOL: f64 = 1e-10;

pub(crate) fn check_periodic_solvable(grid: &Grid, nodal: &[f64]) -> Result<()> {
    let integral = integrate(grid, nodal);
    if integral.abs() > PERIODIC_SOLVABILITY_TOL {
        return Err(Error::NonSolvable { integral });
    }
    Ok(())
}
