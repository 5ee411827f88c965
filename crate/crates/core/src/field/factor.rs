use super::{CovarianceModel, Grid, Kernel};
use crate::{Error, Result};

/// Added to the covariance diagonal before factorization.
pub const DEFAULT_NUGGET: f64 = 1e-10;
/// Pivots below this fraction of the largest pivot are truncated.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// Low-rank pivoted Cholesky factor `C ~ G G^T` of a grid covariance matrix.
///
/// `G` is stored in original node order: row `i` of `G` only has entries in
/// the columns up to the step at which node `i` was pivoted, so rows are kept
/// ragged and a sample costs about `N r / 2` multiply-adds.
#[derive(Debug, Clone)]
pub struct FieldFactor {
    grid: Grid,
    model: CovarianceModel,
    rank: usize,
    pivot_tol: f64,
    nugget: f64,
    /// Node pivoted at each step.
    pivots: Vec<usize>,
    /// Pivot values (Schur complement diagonals) at each step.
    pivot_values: Vec<f64>,
    row_start: Vec<usize>,
    entries: Vec<f64>,
    min_residual: f64,
}

impl FieldFactor {
    /// Factorizes the covariance matrix of `model` on the nodes of `grid`.
    pub fn factorize(grid: &Grid, model: &CovarianceModel, pivot_tol: f64) -> Result<Self> {
        Self::factorize_with_nugget(grid, model, pivot_tol, DEFAULT_NUGGET)
    }

    pub fn factorize_with_nugget(grid: &Grid, model: &CovarianceModel, pivot_tol: f64, nugget: f64) -> Result<Self> {
        if model.kernel == Kernel::PeriodicExtension && grid.dim() != super::Dimension::One {
            return Err(Error::Unsupported("periodic covariance extension is only defined in 1D".into()));
        }
        if !(model.correlation_length > 0.0) {
            return Err(Error::config("correlation_length", "must be positive"));
        }
        let points: Vec<[f64; 2]> = (0..grid.len()).map(|k| grid.point(k)).collect();
        let entry = |i: usize, j: usize| model.covariance(points[i], points[j]);
        // The wrapped kernel is indefinite by construction; only its positive
        // part can be sampled, so negative trailing pivots are not an error.
        let strict = model.kernel == Kernel::SquaredExponential;
        let raw = pivoted_cholesky(grid.len(), entry, nugget, pivot_tol, strict)?;
        Ok(Self::from_raw(grid.clone(), *model, raw, pivot_tol, nugget))
    }

    fn from_raw(grid: Grid, model: CovarianceModel, raw: RawFactor, pivot_tol: f64, nugget: f64) -> Self {
        FieldFactor {
            grid,
            model,
            rank: raw.pivots.len(),
            pivot_tol,
            nugget,
            pivots: raw.pivots,
            pivot_values: raw.pivot_values,
            row_start: raw.row_start,
            entries: raw.entries,
            min_residual: raw.min_residual,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numerical rank `r`: number of standard normals consumed per sample.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pivot_tol(&self) -> f64 {
        self.pivot_tol
    }

    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    /// Most negative diagonal of the truncated Schur complement (0 for a
    /// positive semi-definite kernel up to round-off). The wrapped periodic
    /// kernel is not positive definite, so this is where its deficit shows.
    pub fn min_residual(&self) -> f64 {
        self.min_residual
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn pivot_values(&self) -> &[f64] {
        &self.pivot_values
    }

    /// Row `i` of `G` (trailing zeros omitted).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[self.row_start[i]..self.row_start[i + 1]]
    }

    /// `(G G^T)_{ij}`.
    pub fn reconstruct(&self, i: usize, j: usize) -> f64 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum()
    }

    /// Writes `G z` into `out`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.rank);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    /// Covariance column `C(x - x_node)` over all grid nodes.
    pub fn covariance_column(&self, node: usize) -> Vec<f64> {
        let p = self.grid.point(node);
        (0..self.grid.len()).map(|k| self.model.covariance(self.grid.point(k), p)).collect()
    }
}

pub(crate) struct RawFactor {
    pub pivots: Vec<usize>,
    pub pivot_values: Vec<f64>,
    pub row_start: Vec<usize>,
    pub entries: Vec<f64>,
    pub min_residual: f64,
}

/// Outer-product pivoted Cholesky on a symmetric positive semi-definite matrix
/// given by its entries, stopping once the largest remaining pivot drops below
/// `rel_tol` times the first pivot. Negative trailing diagonals left over
/// from an indefinite kernel are truncated with the rest, as in LAPACK's
/// `dpstrf`, and reported through `min_residual`.
pub(crate) fn pivoted_cholesky(
    n: usize,
    entry: impl Fn(usize, usize) -> f64,
    nugget: f64,
    rel_tol: f64,
    strict: bool,
) -> Result<RawFactor> {
    let mut diag: Vec<f64> = (0..n).map(|i| entry(i, i) + nugget).collect();
    let mut done = vec![false; n];
    let mut step_of = vec![usize::MAX; n];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut pivots = Vec::new();
    let mut pivot_values = Vec::new();

    let first = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = first.max(0.0);
    let stop = rel_tol * scale;
    let negative_limit = -1e-8 * scale.max(f64::MIN_POSITIVE);

    for step in 0..n {
        let mut p = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            if !done[i] && diag[i] > best {
                best = diag[i];
                p = i;
            }
        }
        if p == usize::MAX || !(best > stop) || best <= 0.0 {
            break;
        }
        let root = best.sqrt();
        let mut col = vec![0.0; n];
        for i in 0..n {
            if !done[i] && i != p {
                col[i] = entry(i, p);
            }
        }
        for prev in &columns {
            let gp = prev[p];
            if gp != 0.0 {
                for i in 0..n {
                    col[i] -= gp * prev[i];
                }
            }
        }
        for i in 0..n {
            if done[i] {
                col[i] = 0.0;
            } else if i == p {
                col[i] = root;
            } else {
                col[i] /= root;
                diag[i] -= col[i] * col[i];
            }
        }
        done[p] = true;
        step_of[p] = step;
        pivots.push(p);
        pivot_values.push(best);
        columns.push(col);
    }

    // The next pivot is the largest remaining diagonal; if even that is
    // clearly negative the matrix is not a covariance.
    let remaining = (0..n).filter(|&i| !done[i]).map(|i| diag[i]);
    let next = remaining.clone().fold(f64::NEG_INFINITY, f64::max);
    if strict && next.is_finite() && next < negative_limit {
        return Err(Error::Factorization { step: pivots.len(), pivot: next });
    }
    let min_residual = remaining.fold(0.0, f64::min);

    let rank = pivots.len();
    let mut row_start = Vec::with_capacity(n + 1);
    let mut entries = Vec::new();
    row_start.push(0);
    for i in 0..n {
        let width = if step_of[i] == usize::MAX { rank } else { step_of[i] + 1 };
        entries.extend(columns.iter().take(width).map(|c| c[i]));
        row_start.push(entries.len());
    }
    Ok(RawFactor { pivots, pivot_values, row_start, entries, min_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(n: usize, m: &[f64], nugget: f64, tol: f64) -> Result<RawFactor> {
        pivoted_cholesky(n, |i, j| m[i * n + j], nugget, tol, true)
    }

    fn row(raw: &RawFactor, i: usize) -> &[f64] {
        &raw.entries[raw.row_start[i]..raw.row_start[i + 1]]
    }

    #[test]
    fn identity_is_its_own_factor() {
        let n = 4;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        let raw = dense(n, &m, 0.0, 1e-12).unwrap();
        assert_eq!(raw.pivots.len(), n);
        for i in 0..n {
            let r = row(&raw, i);
            for (k, &v) in r.iter().enumerate() {
                let expected = if raw.pivots[k] == i { 1.0 } else { 0.0 };
                assert_eq!(v, expected);
            }
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let raw = dense(2, &[1.0, 0.5, 0.5, 1.0], 0.0, 1e-12).unwrap();
        assert_eq!(raw.pivots, vec![0, 1]);
        assert_eq!(row(&raw, 0), &[1.0]);
        let r1 = row(&raw, 1);
        assert!((r1[0] - 0.5).abs() < 1e-15);
        assert!((r1[1] - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rank_one_matrix_is_truncated() {
        let raw = dense(2, &[1.0, 1.0, 1.0, 1.0], 0.0, 1e-12).unwrap();
        assert_eq!(raw.pivots.len(), 1);
        assert_eq!(row(&raw, 0), &[1.0]);
        assert_eq!(row(&raw, 1), &[1.0]);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let err = dense(2, &[1.0, 2.0, 2.0, 1.0], 0.0, 1e-12).err().unwrap();
        assert!(matches!(err, Error::Factorization { .. }));
    }

    #[test]
    fn largest_diagonal_is_pivoted_first() {
        let raw = dense(3, &[1.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 2.0], 0.0, 1e-12).unwrap();
        assert_eq!(raw.pivots, vec![1, 2, 0]);
        assert_eq!(raw.pivot_values, vec![4.0, 2.0, 1.0]);
    }

    #[test]
    fn grid_factor_reconstructs_covariance() {
        for (grid, model) in [
            (Grid::line(101).unwrap(), CovarianceModel::squared_exponential(0.1)),
            (Grid::line(64).unwrap(), CovarianceModel::periodic(0.1)),
            (Grid::square(12).unwrap(), CovarianceModel::squared_exponential(0.6)),
        ] {
            let f = FieldFactor::factorize(&grid, &model, DEFAULT_PIVOT_TOL).unwrap();
            assert!(f.rank() <= grid.len());
            let tol = (f.pivot_tol() * 1.0).max(1e-8);
            for i in 0..grid.len() {
                for j in 0..grid.len() {
                    let c = model.covariance(grid.point(i), grid.point(j));
                    let r = f.reconstruct(i, j);
                    assert!((c - r).abs() <= tol, "({i},{j}): {c} vs {r}");
                }
            }
        }
    }

    #[test]
    fn loose_tolerance_truncates_rank() {
        let grid = Grid::line(201).unwrap();
        let model = CovarianceModel::squared_exponential(0.2);
        let f = FieldFactor::factorize(&grid, &model, 1e-8).unwrap();
        assert!(f.rank() < 60, "rank {}", f.rank());
        for i in (0..201).step_by(7) {
            for j in (0..201).step_by(5) {
                let c = model.covariance(grid.point(i), grid.point(j));
                assert!((c - f.reconstruct(i, j)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn wrapped_kernel_is_truncated_not_rejected() {
        let grid = Grid::line(401).unwrap();
        let model = CovarianceModel::periodic(0.2);
        let f = FieldFactor::factorize(&grid, &model, DEFAULT_PIVOT_TOL).unwrap();
        assert!(f.rank() < 401);
        assert!(f.min_residual() < -1e-4);
        // the sampled covariance stays within 1% of the wrapped kernel
        for i in (0..401).step_by(3) {
            for j in (0..401).step_by(5) {
                let c = model.covariance(grid.point(i), grid.point(j));
                assert!((c - f.reconstruct(i, j)).abs() < 1e-2);
            }
        }
    }

    #[test]
    fn periodic_rejected_in_two_dimensions() {
        let grid = Grid::square(5).unwrap();
        let err = FieldFactor::factorize(&grid, &CovarianceModel::periodic(0.2), 1e-12).err().unwrap();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
