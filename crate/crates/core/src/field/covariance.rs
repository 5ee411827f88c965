use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    SquaredExponential,
    /// Period-1 wrap of the squared exponential (1D only).
    PeriodicExtension,
}

/// Stationary unit-variance covariance `C(x - y) = exp(-|x - y|^2 / R^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceModel {
    pub kernel: Kernel,
    pub correlation_length: f64,
}

impl CovarianceModel {
    pub fn squared_exponential(correlation_length: f64) -> Self {
        CovarianceModel { kernel: Kernel::SquaredExponential, correlation_length }
    }

    pub fn periodic(correlation_length: f64) -> Self {
        CovarianceModel { kernel: Kernel::PeriodicExtension, correlation_length }
    }

    /// Covariance between two points; the second coordinate is ignored by the
    /// periodic kernel.
    pub fn covariance(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let r2 = self.correlation_length * self.correlation_length;
        let d2 = match self.kernel {
            Kernel::SquaredExponential => {
                let d0 = x[0] - y[0];
                let d1 = x[1] - y[1];
                d0 * d0 + d1 * d1
            }
            Kernel::PeriodicExtension => {
                let d = wrap_distance(x[0], y[0]);
                d * d
            }
        };
        (-d2 / r2).exp()
    }
}

/// Distance on the unit circle, `min(|d|, 1 - |d|)` after reducing mod 1.
fn wrap_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs().rem_euclid(1.0);
    d.min(1.0 - d)
}
