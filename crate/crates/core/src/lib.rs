//! Rare-event estimation of strain failure probabilities for the elliptic
//! problem `-div(a grad u) = f` with lognormal coefficient `a = exp(-xi)`.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: grids, covariance kernels, pivoted Cholesky factors and
//!   (conditional) Gaussian field samples.
//! - [`pde`]: closed-form and finite volume solvers plus the strain supremum.
//! - [`level`]: excursion level function and the two proposal densities
//!   (location weights and shifted marginals).
//! - [`estimator`]: direct Monte Carlo and the mixture importance sampler,
//!   streaming statistics and sample-size planning.
//! - [`experiments`]: exponential-relation fits, table reproduction, the
//!   variance sweep and quadratic tail fits.
//! - [`cli`]: configuration resolution and the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod field;
pub mod level;
pub mod pde;
pub mod rng;

pub use error::{Error, Result};

pub use field::{CovarianceModel, FieldFactor, FieldSample, Grid, Kernel};

pub use estimator::{EstimatorConfig, EstimatorResult, Method, Simulation};
pub use level::{LevelFunction, ProposalDensities, SigmaMode};
pub use pde::{Boundary, FaceAverage, Forcing, PdeSolution, PdeSolver};
