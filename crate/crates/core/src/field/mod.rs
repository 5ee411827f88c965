//! Grids, covariance kernels and Gaussian field sampling.

mod covariance;
mod factor;
mod grid;
mod sample;

pub use covariance::{CovarianceModel, Kernel};
pub use factor::{FieldFactor, DEFAULT_NUGGET, DEFAULT_PIVOT_TOL};
pub use grid::{Dimension, Grid};
pub use sample::{conditional_mean, sample_conditional, sample_unconditional, Conditioning, FieldSample};
