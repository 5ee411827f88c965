use rand::Rng;
use rand_distr::StandardNormal;

use super::{CovarianceModel, FieldFactor, Grid};

/// Record of the single-node conditioning used to build a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    pub node: usize,
    pub value: f64,
}

/// Values of the Gaussian field at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub values: Vec<f64>,
    pub conditioning: Option<Conditioning>,
}

impl FieldSample {
    pub fn zeros(len: usize) -> Self {
        FieldSample { values: vec![0.0; len], conditioning: None }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Unconditional draw `G z` with `z` i.i.d. standard normal.
pub fn sample_unconditional<R: Rng + ?Sized>(factor: &FieldFactor, rng: &mut R) -> FieldSample {
    let z: Vec<f64> = (0..factor.rank()).map(|_| rng.sample(StandardNormal)).collect();
    let mut values = vec![0.0; factor.len()];
    factor.apply(&z, &mut values);
    FieldSample { values, conditioning: None }
}

/// Draw conditioned on `xi(node) = value` by shifting an unconditional draw:
/// `xi(x) = xi'(x) + C(x - node) (value - xi'(node))`.
pub fn sample_conditional<R: Rng + ?Sized>(factor: &FieldFactor, node: usize, value: f64, rng: &mut R) -> FieldSample {
    let mut sample = sample_unconditional(factor, rng);
    let column = factor.covariance_column(node);
    condition_in_place(&mut sample.values, &column, node, value);
    sample.conditioning = Some(Conditioning { node, value });
    sample
}

pub(crate) fn condition_in_place(values: &mut [f64], column: &[f64], node: usize, value: f64) {
    let shift = value - values[node];
    for (v, c) in values.iter_mut().zip(column) {
        *v += c * shift;
    }
    values[node] = value;
}

/// Conditional mean field `level * C(x - node)`.
pub fn conditional_mean(model: &CovarianceModel, grid: &Grid, node: usize, level: f64) -> FieldSample {
    let p = grid.point(node);
    let mut values: Vec<f64> = (0..grid.len()).map(|k| level * model.covariance(grid.point(k), p)).collect();
    values[node] = level;
    FieldSample { values, conditioning: Some(Conditioning { node, value: level }) }
}
