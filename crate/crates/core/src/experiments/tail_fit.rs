use crate::{Error, Result};

/// Rows with a relative error at or above this carry no usable information.
pub const MAX_TAIL_REL_ERR: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub b: f64,
    pub p_hat: f64,
    pub rel_err: f64,
}

/// `log p = q2 (log b)^2 + q1 log b + q0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub q2: f64,
    pub q1: f64,
    pub q0: f64,
    pub r_squared: f64,
    pub rows: Vec<TailRow>,
}

impl TailFit {
    pub fn predict(&self, b: f64) -> f64 {
        let t = b.ln();
        (self.q2 * t * t + self.q1 * t + self.q0).exp()
    }

    pub fn summary(&self) -> String {
        format!(
            "q2 = {:e}\nq1 = {:e}\nq0 = {:e}\nr_squared = {:e}\nrows = {}\n",
            self.q2,
            self.q1,
            self.q0,
            self.r_squared,
            self.rows.len()
        )
    }
}

/// Least-squares quadratic in `log b` through `log p_hat`, using rows with
/// `p_hat > 0` and `rel_err < 20`.
pub fn fit_tail(rows: &[TailRow]) -> Result<TailFit> {
    let used: Vec<TailRow> = rows
        .iter()
        .filter(|r| r.b > 0.0 && r.p_hat > 0.0 && r.rel_err.is_finite() && r.rel_err < MAX_TAIL_REL_ERR)
        .copied()
        .collect();
    if used.len() < 4 {
        return Err(Error::InsufficientRows(used.len()));
    }
    let t: Vec<f64> = used.iter().map(|r| r.b.ln()).collect();
    let y: Vec<f64> = used.iter().map(|r| r.p_hat.ln()).collect();
    let shift = t.iter().sum::<f64>() / t.len() as f64;
    // normal equations in the centered variable s = t - shift
    let mut a = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&ti, &yi) in t.iter().zip(&y) {
        let s = ti - shift;
        let basis = [s * s, s, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * yi;
        }
    }
    let [c2, c1, c0] =
        solve3(a, rhs).ok_or_else(|| Error::config("b", "tail fit needs at least three distinct thresholds"))?;
    let q2 = c2;
    let q1 = c1 - 2.0 * c2 * shift;
    let q0 = c2 * shift * shift - c1 * shift + c0;

    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = t
        .iter()
        .zip(&y)
        .map(|(ti, yi)| {
            let s = ti - shift;
            (yi - (c2 * s * s + c1 * s + c0)).powi(2)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(TailFit { q2, q1, q0, r_squared, rows: used })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..3 {
            let m = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= m * a[col][c];
            }
            b[r] -= m * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
