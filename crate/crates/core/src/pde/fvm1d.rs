use super::{gradient, Boundary, FaceAverage, Forcing, PdeSolution};
use crate::field::{Dimension, Grid};
use crate::{Error, Result};

/// Cell-centered finite volumes on the node mesh:
/// `a_{i-1/2} (u_i - u_{i-1}) + a_{i+1/2} (u_i - u_{i+1}) = f_i h^2`.
///
/// Periodic problems pin `u_0 = 0` and drop the equation of node 0, which
/// is redundant once the discrete forcing has zero mean.
pub fn solve_1d_fvm(
    grid: &Grid,
    xi: &[f64],
    forcing: &Forcing,
    boundary: Boundary,
    face: FaceAverage,
) -> Result<PdeSolution> {
    if grid.dim() != Dimension::One {
        return Err(Error::Unsupported("solve_1d_fvm needs a 1D grid".into()));
    }
    let f = forcing.nodal(grid)?;
    if boundary == Boundary::Periodic {
        super::forcing::check_periodic_solvable(grid, &f)?;
    }
    solve_nodal(grid, xi, &f, boundary, face)
}

pub(crate) fn solve_nodal(
    grid: &Grid,
    xi: &[f64],
    f: &[f64],
    boundary: Boundary,
    face: FaceAverage,
) -> Result<PdeSolution> {
    let n = grid.len();
    let h = grid.spacing();
    let h2 = h * h;

    let mut rhs: Vec<f64> = f.to_vec();
    if boundary == Boundary::Periodic {
        // Nodes 0 and n-1 are the same point; remove the O(h^2) discrete mean.
        let mean = f[..n - 1].iter().sum::<f64>() / (n - 1) as f64;
        for v in rhs.iter_mut() {
            *v -= mean;
        }
    }

    let faces: Vec<f64> = (0..n - 1).map(|i| face.coefficient(xi[i], xi[i + 1])).collect();
    let m = n - 2;
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut b = vec![0.0; m];
    for r in 0..m {
        let i = r + 1;
        diag[r] = faces[i - 1] + faces[i];
        lower[r] = -faces[i - 1];
        upper[r] = -faces[i];
        b[r] = rhs[i] * h2;
    }
    let interior = super::linear::thomas(&lower, &diag, &upper, &b);

    let mut u = vec![0.0; n];
    u[1..n - 1].copy_from_slice(&interior);
    let grad = gradient::gradient_1d(&u, h, boundary);
    Ok(PdeSolution::from_gradient(u, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_matches_parabola() {
        let g = Grid::line(401).unwrap();
        let s = solve_1d_fvm(&g, &vec![0.0; 401], &Forcing::Constant(1.0), Boundary::Dirichlet, FaceAverage::Geometric)
            .unwrap();
        let err = g.axis().iter().zip(&s.u).map(|(x, u)| (u - x * (1.0 - x) / 2.0).abs()).fold(0.0, f64::max);
        assert!(err < 1e-5, "max error {err}");
        assert_eq!(s.u[0], 0.0);
        assert_eq!(s.u[400], 0.0);
        assert!((s.strain_sup - 0.5).abs() < 1e-9);
    }

    #[test]
    fn periodic_quadratic_accepted() {
        let g = Grid::line(401).unwrap();
        let s =
            solve_1d_fvm(&g, &vec![0.0; 401], &Forcing::Quadratic, Boundary::Periodic, FaceAverage::Geometric).unwrap();
        assert_eq!(s.u[0], s.u[400]);
        assert!(s.strain_sup.is_finite() && s.strain_sup > 0.0);
    }

    #[test]
    fn periodic_constant_rejected() {
        let g = Grid::line(401).unwrap();
        let err =
            solve_1d_fvm(&g, &vec![0.0; 401], &Forcing::Constant(1.0), Boundary::Periodic, FaceAverage::Geometric);
        assert!(matches!(err, Err(Error::NonSolvable { .. })));
    }

    #[test]
    fn harmonic_and_geometric_agree_for_smooth_fields() {
        let g = Grid::line(401).unwrap();
        let xi: Vec<f64> = g.axis().iter().map(|x| (3.0 * x).sin()).collect();
        let a = solve_1d_fvm(&g, &xi, &Forcing::Constant(1.0), Boundary::Dirichlet, FaceAverage::Geometric).unwrap();
        let b = solve_1d_fvm(&g, &xi, &Forcing::Constant(1.0), Boundary::Dirichlet, FaceAverage::Harmonic).unwrap();
        assert!((a.strain_sup - b.strain_sup).abs() / a.strain_sup < 1e-4);
    }
}
