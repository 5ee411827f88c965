use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            other => Err(Error::config("dim", format!("expected 1 or 2, got {other}"))),
        }
    }

    pub fn as_usize(self) -> usize {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

/// Uniform node-centered mesh on `[0,1]^d`, boundary nodes included.
///
/// Nodes are numbered with the first axis fastest: node `k = i + n1 * j`
/// sits at `(x1_i, x2_j)`. Every node owns the part of the domain closer
/// to it than to any other node, so boundary nodes own half cells and
/// corner nodes quarter cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: Dimension,
    n1: usize,
    n2: usize,
    axis: Vec<f64>,
    cell: Vec<f64>,
}

impl Grid {
    pub fn build(dim: Dimension, nodes_per_axis: usize) -> Result<Self> {
        match dim {
            Dimension::One => Self::line(nodes_per_axis),
            Dimension::Two => Self::square(nodes_per_axis),
        }
    }

    pub fn line(n: usize) -> Result<Self> {
        let axis = axis_nodes(n)?;
        let cell = axis_cells(n);
        Ok(Grid { dim: Dimension::One, n1: n, n2: 1, axis, cell })
    }

    pub fn square(n: usize) -> Result<Self> {
        let axis = axis_nodes(n)?;
        let w = axis_cells(n);
        let mut cell = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                cell.push(w[i] * w[j]);
            }
        }
        Ok(Grid { dim: Dimension::Two, n1: n, n2: n, axis, cell })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.n1
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Uniform spacing `1/(n-1)`.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.n1 - 1) as f64
    }

    /// Coordinates along one axis (shared by both axes in 2D).
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Cell measure of every node; sums to one.
    pub fn cell_measures(&self) -> &[f64] {
        &self.cell
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.n1 * j
    }

    /// Axis indices `(i, j)` of node `k` (`j = 0` in 1D).
    pub fn split(&self, k: usize) -> (usize, usize) {
        (k % self.n1, k / self.n1)
    }

    /// Node coordinates; the second component is 0 in 1D.
    pub fn point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.split(k);
        match self.dim {
            Dimension::One => [self.axis[i], 0.0],
            Dimension::Two => [self.axis[i], self.axis[j]],
        }
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        let (i, j) = self.split(k);
        let last = self.n1 - 1;
        match self.dim {
            Dimension::One => i == 0 || i == last,
            Dimension::Two => i == 0 || i == last || j == 0 || j == last,
        }
    }

    /// Node nearest to the given coordinates.
    pub fn nearest(&self, x: [f64; 2]) -> usize {
        let h = self.spacing();
        let snap = |t: f64| ((t / h).round().max(0.0) as usize).min(self.n1 - 1);
        match self.dim {
            Dimension::One => snap(x[0]),
            Dimension::Two => self.index(snap(x[0]), snap(x[1])),
        }
    }
}

fn axis_nodes(n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 nodes per axis to have an interior, got {n}")));
    }
    let h = 1.0 / (n - 1) as f64;
    let mut x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    x[n - 1] = 1.0;
    Ok(x)
}

fn axis_cells(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let mut w = vec![h; n];
    w[0] = h / 2.0;
    w[n - 1] = h / 2.0;
    w
}
