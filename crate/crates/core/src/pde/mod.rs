//! Elliptic solvers for `-div(exp(-xi) grad u) = f` and the strain supremum.

mod closed_form;
mod forcing;
mod fvm1d;
mod fvm2d;
mod gradient;
mod linear;

use serde::{Deserialize, Serialize};

pub use closed_form::solve_1d_closed_form;
pub use forcing::Forcing;
pub use fvm1d::solve_1d_fvm;
pub use fvm2d::{assemble_2d, solve_2d_fvm, StencilMatrix};
pub use gradient::{nodal_gradient, strain_sup};
pub use linear::{banded_cholesky_solve, conjugate_gradient, CgReport};

use crate::field::{Dimension, Grid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// Rule for the coefficient on the face between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceAverage {
    /// `exp(-(xi_i + xi_j) / 2)`
    #[default]
    Geometric,
    /// `2 a_i a_j / (a_i + a_j)`
    Harmonic,
}

impl FaceAverage {
    #[inline]
    pub fn coefficient(self, xi_i: f64, xi_j: f64) -> f64 {
        match self {
            FaceAverage::Geometric => (-0.5 * (xi_i + xi_j)).exp(),
            FaceAverage::Harmonic => {
                let (a, b) = ((-xi_i).exp(), (-xi_j).exp());
                2.0 * a * b / (a + b)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Explicit 1D solution with trapezoidal quadrature.
    ClosedForm,
    FiniteVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    ConjugateGradient,
    BandedCholesky,
}

/// Solver settings shared by all samples of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeSolver {
    pub kind: SolverKind,
    pub boundary: Boundary,
    pub face: FaceAverage,
    pub linear: LinearSolver,
    /// Relative residual target for conjugate gradient.
    pub cg_tol: f64,
    /// Iteration cap is `cg_cap_factor * N`.
    pub cg_cap_factor: usize,
}

impl PdeSolver {
    pub fn default_for(dim: Dimension, boundary: Boundary) -> Self {
        PdeSolver {
            kind: match dim {
                Dimension::One => SolverKind::ClosedForm,
                Dimension::Two => SolverKind::FiniteVolume,
            },
            boundary,
            face: FaceAverage::Geometric,
            linear: LinearSolver::BandedCholesky,
            cg_tol: 1e-10,
            cg_cap_factor: 20,
        }
    }
}

/// Solution on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSolution {
    pub u: Vec<f64>,
    pub gradient: Vec<[f64; 2]>,
    pub strain_sup: f64,
    pub argmax: usize,
}

impl PdeSolution {
    pub(crate) fn from_gradient(u: Vec<f64>, gradient: Vec<[f64; 2]>) -> Self {
        let (strain_sup, argmax) = gradient::sup_norm(&gradient);
        PdeSolution { u, gradient, strain_sup, argmax }
    }
}

/// Anything that maps a field sample to the strain supremum. The PDE is the
/// production implementation; tests plug in synthetic responses.
pub trait StrainResponse: Sync {
    fn grid(&self) -> &Grid;
    fn strain_sup(&self, xi: &[f64]) -> Result<f64>;
}

/// Grid, forcing and solver bundled for repeated solves.
#[derive(Debug, Clone)]
pub struct PdeProblem {
    grid: Grid,
    forcing: Forcing,
    nodal_forcing: Vec<f64>,
    solver: PdeSolver,
}

impl PdeProblem {
    pub fn new(grid: Grid, forcing: Forcing, solver: PdeSolver) -> Result<Self> {
        if solver.boundary == Boundary::Periodic && grid.dim() != Dimension::One {
            return Err(Error::Unsupported("periodic boundary conditions are only supported in 1D".into()));
        }
        if solver.kind == SolverKind::ClosedForm && grid.dim() != Dimension::One {
            return Err(Error::Unsupported("the closed-form solver is one-dimensional".into()));
        }
        let nodal_forcing = forcing.nodal(&grid)?;
        if solver.boundary == Boundary::Periodic {
            forcing::check_periodic_solvable(&grid, &nodal_forcing)?;
        }
        Ok(PdeProblem { grid, forcing, nodal_forcing, solver })
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn solver(&self) -> &PdeSolver {
        &self.solver
    }

    pub fn solve(&self, xi: &[f64]) -> Result<PdeSolution> {
        match (self.grid.dim(), self.solver.kind) {
            (Dimension::One, SolverKind::ClosedForm) => {
                closed_form::solve_nodal(&self.grid, xi, &self.nodal_forcing, self.solver.boundary)
            }
            (Dimension::One, SolverKind::FiniteVolume) => {
                fvm1d::solve_nodal(&self.grid, xi, &self.nodal_forcing, self.solver.boundary, self.solver.face)
            }
            (Dimension::Two, _) => fvm2d::solve_nodal(&self.grid, xi, &self.nodal_forcing, &self.solver),
        }
    }
}

impl StrainResponse for PdeProblem {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn strain_sup(&self, xi: &[f64]) -> Result<f64> {
        Ok(self.solve(xi)?.strain_sup)
    }
}
