use super::Boundary;
use crate::field::{Dimension, Grid};

/// Nodal gradient of nodal values: central differences inside, second-order
/// one-sided differences on the boundary (wrap-around for periodic 1D).
pub fn nodal_gradient(grid: &Grid, u: &[f64], boundary: Boundary) -> Vec<[f64; 2]> {
    match grid.dim() {
        Dimension::One => gradient_1d(u, grid.spacing(), boundary),
        Dimension::Two => gradient_2d(grid, u),
    }
}

/// Maximum Euclidean norm of the nodal gradient of `u` and the node where it
/// is attained (smallest index on ties).
pub fn strain_sup(grid: &Grid, u: &[f64], boundary: Boundary) -> (f64, usize) {
    sup_norm(&nodal_gradient(grid, u, boundary))
}

pub(crate) fn sup_norm(gradient: &[[f64; 2]]) -> (f64, usize) {
    let mut best = 0.0;
    let mut arg = 0;
    for (k, g) in gradient.iter().enumerate() {
        let norm = g[0].hypot(g[1]);
        if norm > best {
            best = norm;
            arg = k;
        }
    }
    (best, arg)
}

#[inline]
fn derivative(u: &[f64], i: usize, n: usize, stride: usize, offset: usize, h: f64) -> f64 {
    let at = |k: usize| u[offset + k * stride];
    if i == 0 {
        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
    } else {
        (at(i + 1) - at(i - 1)) / (2.0 * h)
    }
}

pub(crate) fn gradient_1d(u: &[f64], h: f64, boundary: Boundary) -> Vec<[f64; 2]> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let d = match boundary {
                Boundary::Periodic if i == 0 || i == n - 1 => (u[1] - u[n - 2]) / (2.0 * h),
                _ => derivative(u, i, n, 1, 0, h),
            };
            [d, 0.0]
        })
        .collect()
}

pub(crate) fn gradient_2d(grid: &Grid, u: &[f64]) -> Vec<[f64; 2]> {
    let n = grid.nodes_per_axis();
    let h = grid.spacing();
    let mut out = vec![[0.0; 2]; n * n];
    for j in 0..n {
        for i in 0..n {
            let dx = derivative(u, i, n, 1, n * j, h);
            let dy = derivative(u, j, n, n, i, h);
            out[grid.index(i, j)] = [dx, dy];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_has_zero_strain() {
        let g = Grid::square(6).unwrap();
        assert_eq!(strain_sup(&g, &[0.0; 36], Boundary::Dirichlet), (0.0, 0));
    }

    #[test]
    fn parabola_peaks_on_boundary() {
        let g = Grid::line(101).unwrap();
        let u: Vec<f64> = g.axis().iter().map(|x| x * (1.0 - x) / 2.0).collect();
        let (s, arg) = strain_sup(&g, &u, Boundary::Dirichlet);
        assert!((s - 0.5).abs() < 1e-12);
        assert!(arg == 0 || arg == 100);
    }

    #[test]
    fn ties_go_to_smallest_index() {
        assert_eq!(sup_norm(&[[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]]), (1.0, 0));
        assert_eq!(sup_norm(&[[0.0, 0.5], [3.0, 4.0], [-4.0, 3.0]]), (5.0, 1));
    }

    #[test]
    fn quadratics_are_differentiated_exactly() {
        let g = Grid::square(7).unwrap();
        let u: Vec<f64> = (0..49)
            .map(|k| {
                let [x, y] = g.point(k);
                x * x + 2.0 * x * y - y * y + 0.3
            })
            .collect();
        let grad = nodal_gradient(&g, &u, Boundary::Dirichlet);
        for k in 0..49 {
            let [x, y] = g.point(k);
            assert!((grad[k][0] - (2.0 * x + 2.0 * y)).abs() < 1e-10);
            assert!((grad[k][1] - (2.0 * x - 2.0 * y)).abs() < 1e-10);
        }
    }

    #[test]
    fn periodic_wraps_at_ends() {
        let g = Grid::line(9).unwrap();
        let u: Vec<f64> = g.axis().iter().map(|x| (2.0 * std::f64::consts::PI * x).sin()).collect();
        let grad = nodal_gradient(&g, &u, Boundary::Periodic);
        assert_eq!(grad[0], grad[8]);
        assert!(grad[0][0] > 5.0);
    }
}
