use super::{Boundary, Forcing, PdeSolution};
use crate::field::{Dimension, Grid};
use crate::{Error, Result};

/// Explicit 1D solution
/// `u'(x) = e^{xi(x)} (c - F(x))`, `c = int F e^xi / int e^xi`,
/// with `F` the antiderivative of `f`. All integrals use the trapezoidal
/// rule on the grid. The constant `c` is the same for Dirichlet and periodic
/// problems; both pin `u(0) = 0`.
pub fn solve_1d_closed_form(grid: &Grid, xi: &[f64], forcing: &Forcing, boundary: Boundary) -> Result<PdeSolution> {
    if grid.dim() != Dimension::One {
        return Err(Error::Unsupported("the closed-form solver is one-dimensional".into()));
    }
    let f = forcing.nodal(grid)?;
    if boundary == Boundary::Periodic {
        super::forcing::check_periodic_solvable(grid, &f)?;
    }
    solve_nodal(grid, xi, &f, boundary)
}

pub(crate) fn solve_nodal(grid: &Grid, xi: &[f64], f: &[f64], boundary: Boundary) -> Result<PdeSolution> {
    let n = grid.len();
    debug_assert_eq!(xi.len(), n);
    let h = grid.spacing();

    let mut big_f = vec![0.0; n];
    for i in 1..n {
        big_f[i] = big_f[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    }
    let ex: Vec<f64> = xi.iter().map(|v| v.exp()).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        num += w * big_f[i] * ex[i];
        den += w * ex[i];
    }
    let c = num / den;

    let du: Vec<f64> = (0..n).map(|i| ex[i] * (c - big_f[i])).collect();
    let mut u = vec![0.0; n];
    for i in 1..n {
        u[i] = u[i - 1] + 0.5 * h * (du[i - 1] + du[i]);
    }
    // The trapezoid of u' vanishes by construction of c; drop round-off.
    u[n - 1] = match boundary {
        Boundary::Dirichlet => 0.0,
        Boundary::Periodic => u[0],
    };
    let gradient = du.into_iter().map(|g| [g, 0.0]).collect();
    Ok(PdeSolution::from_gradient(u, gradient))
}
