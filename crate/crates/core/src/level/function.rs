use rayon::prelude::*;

use super::{find_level, LevelDiagnostics, LevelOptions};
use crate::field::{CovarianceModel, Dimension, Grid};
use crate::pde::StrainResponse;
use crate::{Error, Result};

/// Excursion levels on a coarse tensor grid of anchor nodes, interpolated
/// (piecewise linear / bilinear) to every node of the fine grid.
#[derive(Debug, Clone)]
pub struct LevelFunction {
    b: f64,
    dim: Dimension,
    n: usize,
    /// Anchor positions along one axis (fine-grid axis indices).
    anchor_axis: Vec<usize>,
    /// Anchor values, first axis fastest.
    anchor_values: Vec<f64>,
    diagnostics: Vec<LevelDiagnostics>,
    nodal: Vec<f64>,
}

impl LevelFunction {
    /// Builds a level function from given anchor values.
    pub fn from_anchor_values(grid: &Grid, b: f64, anchor_axis: Vec<usize>, anchor_values: Vec<f64>) -> Result<Self> {
        let n = grid.nodes_per_axis();
        let na = anchor_axis.len();
        if na < 2 || anchor_axis[0] != 0 || anchor_axis[na - 1] != n - 1 || anchor_axis.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::config("coarse_stride", "anchors must be increasing and include both ends"));
        }
        let expected = match grid.dim() {
            Dimension::One => na,
            Dimension::Two => na * na,
        };
        if anchor_values.len() != expected {
            return Err(Error::config(
                "level",
                format!("expected {expected} anchor values, got {}", anchor_values.len()),
            ));
        }
        let nodal = interpolate(grid, &anchor_axis, &anchor_values);
        let diagnostics = anchor_values
            .iter()
            .map(|&v| LevelDiagnostics { raw_level: v, converged: true, ..Default::default() })
            .collect();
        Ok(LevelFunction { b, dim: grid.dim(), n, anchor_axis, anchor_values, diagnostics, nodal })
    }

    /// The same level everywhere.
    pub fn constant(grid: &Grid, b: f64, level: f64) -> Self {
        let axis = vec![0, grid.nodes_per_axis() - 1];
        let count = if grid.dim() == Dimension::One { 2 } else { 4 };
        Self::from_anchor_values(grid, b, axis, vec![level; count]).expect("valid constant level function")
    }

    pub fn threshold(&self) -> f64 {
        self.b
    }

    pub fn anchor_axis(&self) -> &[usize] {
        &self.anchor_axis
    }

    pub fn anchor_values(&self) -> &[f64] {
        &self.anchor_values
    }

    pub fn diagnostics(&self) -> &[LevelDiagnostics] {
        &self.diagnostics
    }

    /// Fine-grid node index of every anchor, in anchor order.
    pub fn anchor_nodes(&self) -> Vec<usize> {
        match self.dim {
            Dimension::One => self.anchor_axis.clone(),
            Dimension::Two => {
                let mut v = Vec::with_capacity(self.anchor_values.len());
                for &j in &self.anchor_axis {
                    for &i in &self.anchor_axis {
                        v.push(i + self.n * j);
                    }
                }
                v
            }
        }
    }

    /// Interpolated level at every fine-grid node.
    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    pub fn len(&self) -> usize {
        self.nodal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodal.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.nodal.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.nodal.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn any_clamped(&self) -> bool {
        self.diagnostics.iter().any(|d| d.clamped)
    }

    pub fn any_diverged(&self) -> bool {
        self.diagnostics.iter().any(|d| d.diverged)
    }
}

/// Anchor positions: every `stride`-th node plus the last node, or
/// `per_axis` evenly spread nodes when no stride is given.
pub(crate) fn anchor_axis(n: usize, stride: Option<usize>, per_axis: usize) -> Result<Vec<usize>> {
    let mut axis: Vec<usize> = match stride {
        Some(0) => return Err(Error::config("coarse_stride", "must be at least 1")),
        Some(s) => (0..n).step_by(s).collect(),
        None => {
            let k = per_axis.clamp(2, n);
            (0..k).map(|j| ((j * (n - 1)) as f64 / (k - 1) as f64).round() as usize).collect()
        }
    };
    axis.dedup();
    if *axis.last().unwrap() != n - 1 {
        axis.push(n - 1);
    }
    Ok(axis)
}

const MAX_ANCHORS: usize = 400;

/// Runs [`find_level`] at every anchor (in parallel) and interpolates.
pub fn build_level_function(
    b: f64,
    model: &CovarianceModel,
    response: &dyn StrainResponse,
    opts: &LevelOptions,
) -> Result<LevelFunction> {
    let grid = response.grid();
    let n = grid.nodes_per_axis();
    let axis = anchor_axis(n, opts.coarse_stride, opts.anchors_per_axis)?;
    let nodes: Vec<usize> = match grid.dim() {
        Dimension::One => axis.clone(),
        Dimension::Two => axis.iter().flat_map(|&j| axis.iter().map(move |&i| i + n * j)).collect(),
    };
    if nodes.len() > MAX_ANCHORS {
        return Err(Error::config(
            "coarse_stride",
            format!("{} anchors requested, at most {MAX_ANCHORS} allowed", nodes.len()),
        ));
    }
    let solved: Vec<(f64, LevelDiagnostics)> =
        nodes.par_iter().map(|&x0| find_level(x0, b, model, response, opts)).collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(solved.len());
    let mut diagnostics = Vec::with_capacity(solved.len());
    for (level, mut d) in solved {
        let v = if level < opts.floor {
            d.clamped = true;
            opts.floor
        } else {
            level
        };
        values.push(v);
        diagnostics.push(d);
    }
    let mut f = LevelFunction::from_anchor_values(grid, b, axis, values)?;
    f.diagnostics = diagnostics;
    Ok(f)
}

/// Linear interpolation weights of fine axis index `i` between anchors.
fn bracket(axis: &[usize], i: usize) -> (usize, f64) {
    let k = axis.partition_point(|&a| a <= i).saturating_sub(1).min(axis.len() - 2);
    let (a0, a1) = (axis[k], axis[k + 1]);
    (k, (i - a0) as f64 / (a1 - a0) as f64)
}

fn interpolate(grid: &Grid, axis: &[usize], values: &[f64]) -> Vec<f64> {
    let n = grid.nodes_per_axis();
    let lerp = |v0: f64, v1: f64, t: f64| {
        if t == 0.0 {
            v0
        } else if t == 1.0 {
            v1
        } else {
            (1.0 - t) * v0 + t * v1
        }
    };
    match grid.dim() {
        Dimension::One => (0..n)
            .map(|i| {
                let (k, t) = bracket(axis, i);
                lerp(values[k], values[k + 1], t)
            })
            .collect(),
        Dimension::Two => {
            let na = axis.len();
            let mut out = vec![0.0; n * n];
            for j in 0..n {
                let (kj, tj) = bracket(axis, j);
                for i in 0..n {
                    let (ki, ti) = bracket(axis, i);
                    let v = |a: usize, b: usize| values[a + na * b];
                    let low = lerp(v(ki, kj), v(ki + 1, kj), ti);
                    let high = lerp(v(ki, kj + 1), v(ki + 1, kj + 1), ti);
                    out[grid.index(i, j)] = lerp(low, high, tj);
                }
            }
            out
        }
    }
}
