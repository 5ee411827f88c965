use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("covariance factorization failed: negative pivot {pivot:e} at step {step}")]
    Factorization { step: usize, pivot: f64 },

    #[error("periodic problem is not solvable: forcing integrates to {integral:e}, expected 0")]
    NonSolvable { integral: f64 },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("degenerate excursion level {level} at node {node}")]
    DegenerateLevel { node: usize, level: f64 },

    #[error("{discarded} of {total} samples discarded after solver failures")]
    TooManyDiscards { discarded: u64, total: u64 },

    #[error("tail fit needs at least 4 usable rows, got {0}")]
    InsufficientRows(usize),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig { key: key.to_string(), reason: reason.into() }
    }
}
