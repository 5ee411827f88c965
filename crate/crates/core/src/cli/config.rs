use std::path::{Path, PathBuf};

use serde::de::value::StrDeserializer;
use serde::de::IntoDeserializer;
use serde::{Deserialize, Serialize};

use crate::estimator::{EstimatorConfig, Method};
use crate::experiments::ExpMode;
use crate::field::{CovarianceModel, Dimension, Kernel};
use crate::level::{LevelOptions, SigmaMode};
use crate::pde::{Boundary, FaceAverage, Forcing, LinearSolver, PdeSolver, SolverKind};
use crate::{Error, Result};

/// Partially specified run settings, as read from a config file or flags.
/// Every key is optional; [`ConfigOverlay::resolve`] applies defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub dim: Option<usize>,
    pub b: Option<f64>,
    #[serde(alias = "R")]
    pub correlation_length: Option<f64>,
    pub kernel: Option<Kernel>,
    pub nodes: Option<usize>,
    pub force: Option<String>,
    pub force_value: Option<f64>,
    pub bc: Option<Boundary>,
    pub method: Option<Method>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub sigma: Option<f64>,
    pub pivot_tol: Option<f64>,
    pub coarse_stride: Option<usize>,
    pub anchors_per_axis: Option<usize>,
    pub level_max_iter: Option<usize>,
    pub level_tol: Option<f64>,
    pub level_floor: Option<f64>,
    pub solver: Option<SolverKind>,
    pub linear_solver: Option<LinearSolver>,
    pub face_average: Option<FaceAverage>,
    pub cg_tol: Option<f64>,
    pub cg_cap_factor: Option<usize>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
    pub timing: Option<bool>,
    pub table: Option<String>,
    pub thresholds: Option<Vec<f64>>,
    pub mc_max_b: Option<f64>,
    pub sigmas: Option<Vec<f64>>,
    pub exp_mode: Option<ExpMode>,
    pub probe: Option<Vec<f64>>,
    pub levels: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
}

/// Fully resolved settings. Serializes back to an overlay that resolves to
/// the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub b: f64,
    pub correlation_length: f64,
    pub kernel: Kernel,
    pub nodes: usize,
    pub force: String,
    pub force_value: f64,
    pub bc: Boundary,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub pivot_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coarse_stride: Option<usize>,
    pub anchors_per_axis: usize,
    pub level_max_iter: usize,
    pub level_tol: f64,
    pub level_floor: f64,
    pub solver: SolverKind,
    pub linear_solver: LinearSolver,
    pub face_average: FaceAverage,
    pub cg_tol: f64,
    pub cg_cap_factor: usize,
    /// Never serialized: the worker count does not affect results.
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub timing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_max_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    pub exp_mode: ExpMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

/// Parses a unit enum value the way the config file would.
pub(crate) fn parse_keyword<'de, T: Deserialize<'de>>(key: &str, value: &'de str) -> Result<T> {
    let de: StrDeserializer<'de, serde::de::value::Error> = value.into_deserializer();
    T::deserialize(de).map_err(|e| Error::config(key, e.to_string()))
}

impl ConfigOverlay {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let at = e.span().map(|span| {
                let line = text[..span.start].matches('\n').count();
                format!(" at line {} `{}`", line + 1, text.lines().nth(line).unwrap_or("").trim())
            });
            Error::Parse(format!("config file{}: {}", at.unwrap_or_default(), e.message()))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Keys set in `other` win.
    pub fn merge(self, other: ConfigOverlay) -> ConfigOverlay {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigOverlay { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            dim,
            b,
            correlation_length,
            kernel,
            nodes,
            force,
            force_value,
            bc,
            method,
            samples,
            seed,
            sigma,
            pivot_tol,
            coarse_stride,
            anchors_per_axis,
            level_max_iter,
            level_tol,
            level_floor,
            solver,
            linear_solver,
            face_average,
            cg_tol,
            cg_cap_factor,
            workers,
            output,
            timing,
            table,
            thresholds,
            mc_max_b,
            sigmas,
            exp_mode,
            probe,
            levels,
            input
        )
    }

    /// Applies defaults and validates every value.
    pub fn resolve(self) -> Result<RunConfig> {
        let dim = self.dim.unwrap_or(1);
        let dimension =
            Dimension::from_usize(dim).map_err(|_| Error::config("dim", format!("must be 1 or 2, got {dim}")))?;
        let two = dimension == Dimension::Two;
        let bc = self.bc.unwrap_or(Boundary::Dirichlet);
        let base = PdeSolver::default_for(dimension, bc);
        let defaults = LevelOptions::default();
        let cfg = RunConfig {
            dim,
            b: self.b.unwrap_or(4.0),
            correlation_length: self.correlation_length.unwrap_or(if two { 0.6 } else { 0.1 }),
            kernel: self.kernel.unwrap_or(match bc {
                Boundary::Periodic => Kernel::PeriodicExtension,
                Boundary::Dirichlet => Kernel::SquaredExponential,
            }),
            nodes: self.nodes.unwrap_or(if two { 25 } else { 401 }),
            force: self.force.unwrap_or_else(|| "constant".into()),
            force_value: self.force_value.unwrap_or(1.0),
            bc,
            method: self.method.unwrap_or(Method::ImportanceSampling),
            samples: self.samples.unwrap_or(100_000),
            seed: self.seed.unwrap_or(42),
            sigma: self.sigma,
            pivot_tol: self.pivot_tol.unwrap_or(crate::field::DEFAULT_PIVOT_TOL),
            coarse_stride: self.coarse_stride,
            anchors_per_axis: self.anchors_per_axis.unwrap_or(defaults.anchors_per_axis),
            level_max_iter: self.level_max_iter.unwrap_or(defaults.max_iter),
            level_tol: self.level_tol.unwrap_or(defaults.tol),
            level_floor: self.level_floor.unwrap_or(defaults.floor),
            solver: self.solver.unwrap_or(base.kind),
            linear_solver: self.linear_solver.unwrap_or(base.linear),
            face_average: self.face_average.unwrap_or(base.face),
            cg_tol: self.cg_tol.unwrap_or(base.cg_tol),
            cg_cap_factor: self.cg_cap_factor.unwrap_or(base.cg_cap_factor),
            workers: self.workers,
            output: self.output,
            timing: self.timing.unwrap_or(false),
            table: self.table,
            thresholds: self.thresholds,
            mc_max_b: self.mc_max_b,
            sigmas: self.sigmas,
            exp_mode: self.exp_mode.unwrap_or(ExpMode::Deterministic),
            probe: self.probe,
            levels: self.levels,
            input: self.input,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        positive("b", self.b)?;
        positive("correlation_length", self.correlation_length)?;
        if self.nodes < 3 {
            return Err(Error::config("nodes", format!("need at least 3 nodes per axis, got {}", self.nodes)));
        }
        self.forcing()?;
        if self.samples == 0 {
            return Err(Error::config("samples", "at least one sample is required"));
        }
        if let Some(s) = self.sigma {
            positive("sigma", s)?;
        }
        if !(self.pivot_tol > 0.0 && self.pivot_tol < 1.0) {
            return Err(Error::config("pivot_tol", format!("must lie in (0, 1), got {}", self.pivot_tol)));
        }
        if self.coarse_stride == Some(0) {
            return Err(Error::config("coarse_stride", "must be at least 1"));
        }
        if self.anchors_per_axis < 2 {
            return Err(Error::config("anchors_per_axis", "need at least 2 anchors per axis"));
        }
        if self.level_max_iter == 0 {
            return Err(Error::config("level_max_iter", "must be at least 1"));
        }
        positive("level_tol", self.level_tol)?;
        if !(self.level_floor >= 0.0) {
            return Err(Error::config("level_floor", format!("must be non-negative, got {}", self.level_floor)));
        }
        positive("cg_tol", self.cg_tol)?;
        if self.cg_cap_factor == 0 {
            return Err(Error::config("cg_cap_factor", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be at least 1"));
        }
        if self.dim == 2 && self.solver == SolverKind::ClosedForm {
            return Err(Error::config("solver", "the closed-form solver is one-dimensional"));
        }
        if self.dim == 2 && (self.bc == Boundary::Periodic || self.kernel == Kernel::PeriodicExtension) {
            return Err(Error::config("bc", "periodic problems are only supported in 1D"));
        }
        for (key, list) in [("thresholds", &self.thresholds), ("sigmas", &self.sigmas), ("levels", &self.levels)] {
            if let Some(values) = list {
                if values.is_empty() {
                    return Err(Error::config(key, "list must not be empty"));
                }
                for &v in values {
                    positive(key, v)?;
                }
            }
        }
        if let Some(m) = self.mc_max_b {
            positive("mc_max_b", m)?;
        }
        if let Some(p) = &self.probe {
            if p.len() != self.dim || p.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::config("probe", format!("expected {} coordinates in [0, 1]", self.dim)));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> Dimension {
        if self.dim == 2 {
            Dimension::Two
        } else {
            Dimension::One
        }
    }

    pub fn forcing(&self) -> Result<Forcing> {
        match self.force.as_str() {
            "constant" => {
                if !self.force_value.is_finite() {
                    return Err(Error::config("force_value", "must be finite"));
                }
                Ok(Forcing::Constant(self.force_value))
            }
            "step" => Ok(Forcing::Step),
            "quadratic" => Ok(Forcing::Quadratic),
            other => Err(Error::config("force", format!("expected constant, step or quadratic, got `{other}`"))),
        }
    }

    pub fn sigma_mode(&self) -> SigmaMode {
        match self.sigma {
            Some(s) => SigmaMode::Constant(s),
            None => SigmaMode::ReciprocalLevel,
        }
    }

    pub fn level_options(&self) -> LevelOptions {
        LevelOptions {
            max_iter: self.level_max_iter,
            tol: self.level_tol,
            floor: self.level_floor,
            anchors_per_axis: self.anchors_per_axis,
            coarse_stride: self.coarse_stride,
        }
    }

    pub fn estimator_config(&self) -> Result<EstimatorConfig> {
        Ok(EstimatorConfig {
            dim: self.dimension(),
            nodes_per_axis: self.nodes,
            model: CovarianceModel { kernel: self.kernel, correlation_length: self.correlation_length },
            forcing: self.forcing()?,
            boundary: self.bc,
            threshold: self.b,
            method: self.method,
            samples: self.samples,
            seed: self.seed,
            sigma_mode: self.sigma_mode(),
            solver: PdeSolver {
                kind: self.solver,
                boundary: self.bc,
                face: self.face_average,
                linear: self.linear_solver,
                cg_tol: self.cg_tol,
                cg_cap_factor: self.cg_cap_factor,
            },
            pivot_tol: self.pivot_tol,
            level: self.level_options(),
            workers: self.workers,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("resolved configuration serializes")
    }
}
