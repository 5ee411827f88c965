use super::{gradient, FaceAverage, Forcing, LinearSolver, PdeSolution, PdeSolver};
use crate::field::{Dimension, Grid};
use crate::{Error, Result};

/// Five-point finite volume operator on the interior nodes of a square grid
/// with homogeneous Dirichlet data. Unknown `r = (i-1) + m (j-1)`, `m = n-2`.
#[derive(Debug, Clone)]
pub struct StencilMatrix {
    pub m: usize,
    pub diag: Vec<f64>,
    /// Coupling to `r + 1` (zero across the right boundary).
    pub east: Vec<f64>,
    /// Coupling to `r + m`.
    pub north: Vec<f64>,
}

impl StencilMatrix {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let m = self.m;
        let len = self.len();
        for r in 0..len {
            let mut v = self.diag[r] * x[r];
            if r + 1 < len {
                v -= self.east[r] * x[r + 1];
            }
            if r >= 1 {
                v -= self.east[r - 1] * x[r - 1];
            }
            if r + m < len {
                v -= self.north[r] * x[r + m];
            }
            if r >= m {
                v -= self.north[r - m] * x[r - m];
            }
            y[r] = v;
        }
    }

    /// Entry `(r, c)` of the matrix (dense lookup, for tests).
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        let m = self.m;
        if r == c {
            self.diag[r]
        } else if c == r + 1 {
            -self.east[r]
        } else if r == c + 1 {
            -self.east[c]
        } else if c == r + m {
            -self.north[r]
        } else if r == c + m {
            -self.north[c]
        } else {
            0.0
        }
    }
}

/// Assembles the operator (scaled by `h^2`, i.e. the face length times the
/// inverse node distance cancel) for the coefficient `exp(-xi)`.
pub fn assemble_2d(grid: &Grid, xi: &[f64], face: FaceAverage) -> StencilMatrix {
    let n = grid.nodes_per_axis();
    let m = n - 2;
    let len = m * m;
    let mut diag = vec![0.0; len];
    let mut east = vec![0.0; len];
    let mut north = vec![0.0; len];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let r = (i - 1) + m * (j - 1);
            let k = grid.index(i, j);
            let ae = face.coefficient(xi[k], xi[grid.index(i + 1, j)]);
            let aw = face.coefficient(xi[k], xi[grid.index(i - 1, j)]);
            let an = face.coefficient(xi[k], xi[grid.index(i, j + 1)]);
            let as_ = face.coefficient(xi[k], xi[grid.index(i, j - 1)]);
            diag[r] = ae + aw + an + as_;
            if i < n - 2 {
                east[r] = ae;
            }
            if j < n - 2 {
                north[r] = an;
            }
        }
    }
    StencilMatrix { m, diag, east, north }
}

/// Solves the 2D Dirichlet problem on a square grid.
pub fn solve_2d_fvm(grid: &Grid, xi: &[f64], forcing: &Forcing, solver: &PdeSolver) -> Result<PdeSolution> {
    if grid.dim() != Dimension::Two {
        return Err(Error::Unsupported("solve_2d_fvm needs a 2D grid".into()));
    }
    let f = forcing.nodal(grid)?;
    solve_nodal(grid, xi, &f, solver)
}

pub(crate) fn solve_nodal(grid: &Grid, xi: &[f64], f: &[f64], solver: &PdeSolver) -> Result<PdeSolution> {
    let n = grid.nodes_per_axis();
    let h = grid.spacing();
    let a = assemble_2d(grid, xi, solver.face);
    let m = a.m;
    let mut rhs = vec![0.0; a.len()];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            rhs[(i - 1) + m * (j - 1)] = f[grid.index(i, j)] * h * h;
        }
    }

    let x = match solver.linear {
        LinearSolver::BandedCholesky => {
            let s = m + 1;
            let mut band = vec![0.0; a.len() * s];
            for r in 0..a.len() {
                band[r * s] = a.diag[r];
                if r >= 1 {
                    band[r * s + 1] = -a.east[r - 1];
                }
                if r >= m {
                    band[r * s + m] = -a.north[r - m];
                }
            }
            let mut x = rhs;
            super::linear::banded_cholesky_solve(&mut band, m, &mut x)
                .ok_or(Error::SolverDiverged { iterations: 0, residual: f64::NAN })?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::SolverDiverged { iterations: 0, residual: f64::NAN });
            }
            x
        }
        LinearSolver::ConjugateGradient => {
            let mut x = vec![0.0; a.len()];
            let cap = solver.cg_cap_factor * grid.len();
            let rep =
                super::linear::conjugate_gradient(|p, q| a.apply(p, q), &a.diag, &rhs, &mut x, solver.cg_tol, cap);
            if !rep.converged {
                return Err(Error::SolverDiverged { iterations: rep.iterations, residual: rep.relative_residual });
            }
            x
        }
    };

    let mut u = vec![0.0; grid.len()];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            u[grid.index(i, j)] = x[(i - 1) + m * (j - 1)];
        }
    }
    let grad = gradient::gradient_2d(grid, &u);
    Ok(PdeSolution::from_gradient(u, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{Boundary, SolverKind};
    use std::f64::consts::PI;

    fn solver(linear: LinearSolver) -> PdeSolver {
        PdeSolver {
            kind: SolverKind::FiniteVolume,
            boundary: Boundary::Dirichlet,
            face: FaceAverage::Geometric,
            linear,
            cg_tol: 1e-10,
            cg_cap_factor: 20,
        }
    }

    fn manufactured_error(n: usize) -> f64 {
        let g = Grid::square(n).unwrap();
        let exact: Vec<f64> = (0..g.len())
            .map(|k| {
                let [x, y] = g.point(k);
                (PI * x).sin() * (PI * y).sin()
            })
            .collect();
        let f = Forcing::Tabulated(exact.iter().map(|u| 2.0 * PI * PI * u).collect());
        let s = solve_2d_fvm(&g, &vec![0.0; g.len()], &f, &solver(LinearSolver::BandedCholesky)).unwrap();
        s.u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        let ratio = manufactured_error(25) / manufactured_error(50);
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn zero_force_zero_solution() {
        let g = Grid::square(10).unwrap();
        let xi: Vec<f64> = (0..100).map(|k| (k as f64 * 0.37).sin()).collect();
        for lin in [LinearSolver::BandedCholesky, LinearSolver::ConjugateGradient] {
            let s = solve_2d_fvm(&g, &xi, &Forcing::Constant(0.0), &solver(lin)).unwrap();
            assert!(s.u.iter().all(|&v| v == 0.0));
            assert_eq!(s.strain_sup, 0.0);
        }
    }

    #[test]
    fn solvers_agree_and_boundary_is_zero() {
        let g = Grid::square(21).unwrap();
        let xi: Vec<f64> = (0..g.len())
            .map(|k| {
                let [x, y] = g.point(k);
                3.0 * (-((x - 0.3).powi(2) + (y - 0.6).powi(2)) / 0.04).exp()
            })
            .collect();
        let a = solve_2d_fvm(&g, &xi, &Forcing::Constant(1.0), &solver(LinearSolver::BandedCholesky)).unwrap();
        let b = solve_2d_fvm(&g, &xi, &Forcing::Constant(1.0), &solver(LinearSolver::ConjugateGradient)).unwrap();
        assert!((a.strain_sup - b.strain_sup).abs() / a.strain_sup < 1e-8);
        for k in 0..g.len() {
            if g.is_boundary(k) {
                assert_eq!(a.u[k], 0.0);
                assert_eq!(b.u[k], 0.0);
            }
        }
    }

    #[test]
    fn m_matrix_structure() {
        let g = Grid::square(8).unwrap();
        let xi: Vec<f64> = (0..64).map(|k| 2.0 * (k as f64 * 1.3).cos()).collect();
        let a = assemble_2d(&g, &xi, FaceAverage::Geometric);
        let len = a.len();
        for r in 0..len {
            let mut off = 0.0;
            for c in 0..len {
                assert_eq!(a.entry(r, c), a.entry(c, r));
                if r != c {
                    assert!(a.entry(r, c) <= 0.0);
                    off += a.entry(r, c).abs();
                }
            }
            assert!(a.entry(r, r) >= off * (1.0 - 1e-14));
        }
    }

    #[test]
    fn cg_iteration_cap_reports_failure() {
        let g = Grid::square(15).unwrap();
        let mut s = solver(LinearSolver::ConjugateGradient);
        s.cg_cap_factor = 0;
        let err = solve_2d_fvm(&g, &vec![0.0; g.len()], &Forcing::Constant(1.0), &s);
        assert!(matches!(err, Err(Error::SolverDiverged { .. })));
    }
}
