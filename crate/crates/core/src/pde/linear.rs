//! Linear solvers for the discretized systems.

/// Thomas algorithm for a tridiagonal system. `lower[0]` and `upper[m-1]`
/// are ignored.
pub(crate) fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[0];
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..m {
        denom = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Jacobi-preconditioned conjugate gradient for an SPD operator.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    rhs: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> CgReport {
    let n = rhs.len();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();

    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgReport { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    let mut rel = norm(&r) / b_norm;
    let mut it = 0;
    while rel > rel_tol && it < max_iter {
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / b_norm;
        it += 1;
        if rel <= rel_tol {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgReport { iterations: it, relative_residual: rel, converged: rel <= rel_tol }
}

/// Solves an SPD banded system in place. `band[i * (w + 1) + d]` holds the
/// entry `(i, i - d)` for `d = 0..=w`; it is overwritten by the Cholesky
/// factor. Returns `None` if a pivot is not positive.
pub fn banded_cholesky_solve(band: &mut [f64], w: usize, rhs: &mut [f64]) -> Option<()> {
    let n = rhs.len();
    let s = w + 1;
    for i in 0..n {
        let j0 = i.saturating_sub(w);
        for j in j0..=i {
            // entry (i, j), d = i - j
            let mut sum = band[i * s + (i - j)];
            let k0 = j0.max(j.saturating_sub(w));
            for k in k0..j {
                sum -= band[i * s + (i - k)] * band[j * s + (j - k)];
            }
            if j == i {
                if !(sum > 0.0) {
                    return None;
                }
                band[i * s] = sum.sqrt();
            } else {
                band[i * s + (i - j)] = sum / band[j * s];
            }
        }
    }
    // forward: L y = b
    for i in 0..n {
        let j0 = i.saturating_sub(w);
        let mut sum = rhs[i];
        for k in j0..i {
            sum -= band[i * s + (i - k)] * rhs[k];
        }
        rhs[i] = sum / band[i * s];
    }
    // backward: L^T x = y
    for i in (0..n).rev() {
        let mut sum = rhs[i];
        for k in i + 1..(i + w + 1).min(n) {
            sum -= band[k * s + (k - i)] * rhs[k];
        }
        rhs[i] = sum / band[i * s];
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(m: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (vec![-1.0; m], vec![2.0; m], vec![-1.0; m])
    }

    #[test]
    fn thomas_solves_laplacian() {
        let m = 9;
        let (l, d, u) = laplacian(m);
        let x_true: Vec<f64> = (0..m).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; m];
        for i in 0..m {
            b[i] =
                2.0 * x_true[i] - if i > 0 { x_true[i - 1] } else { 0.0 } - if i + 1 < m { x_true[i + 1] } else { 0.0 };
        }
        let x = thomas(&l, &d, &u, &b);
        for i in 0..m {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn banded_and_cg_agree() {
        let m = 30;
        let w = 1;
        let mut band = vec![0.0; m * 2];
        for i in 0..m {
            band[i * 2] = 2.0 + 0.1 * i as f64;
            if i > 0 {
                band[i * 2 + 1] = -1.0;
            }
        }
        let dense = |x: &[f64], y: &mut [f64]| {
            for i in 0..m {
                y[i] = (2.0 + 0.1 * i as f64) * x[i];
                if i > 0 {
                    y[i] -= x[i - 1];
                }
                if i + 1 < m {
                    y[i] -= x[i + 1];
                }
            }
        };
        let b: Vec<f64> = (0..m).map(|i| 1.0 + (i % 3) as f64).collect();
        let mut xb = b.clone();
        banded_cholesky_solve(&mut band, w, &mut xb).unwrap();
        let diag: Vec<f64> = (0..m).map(|i| 2.0 + 0.1 * i as f64).collect();
        let mut xc = vec![0.0; m];
        let rep = conjugate_gradient(dense, &diag, &b, &mut xc, 1e-12, 1000);
        assert!(rep.converged);
        for i in 0..m {
            assert!((xb[i] - xc[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn banded_rejects_indefinite() {
        let mut band = vec![1.0, 0.0, 1.0, 2.0];
        assert!(banded_cholesky_solve(&mut band, 1, &mut [1.0, 1.0]).is_none());
    }

    #[test]
    fn cg_reports_non_convergence() {
        let m = 50;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..m {
                y[i] = 2.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < m { x[i + 1] } else { 0.0 };
            }
        };
        let mut x = vec![0.0; m];
        let rep = conjugate_gradient(apply, &vec![2.0; m], &vec![1.0; m], &mut x, 1e-14, 3);
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }
}
