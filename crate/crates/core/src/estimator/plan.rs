use crate::{Error, Result};

/// Chebyshev sample size `ceil(rv / (delta eps^2))` for relative accuracy
/// `eps` with confidence `1 - delta`, never less than one sample.
pub fn required_sample_size(relative_variance: f64, eps: f64, delta: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::config("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config("delta", format!("must lie in (0, 1), got {delta}")));
    }
    if !(relative_variance >= 0.0) || !relative_variance.is_finite() {
        return Err(Error::config(
            "relative_variance",
            format!("must be finite and non-negative, got {relative_variance}"),
        ));
    }
    let x = relative_variance / (delta * eps * eps);
    // absorb representation error of eps and delta before rounding up
    let r = x.round();
    let n = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok((n as u64).max(1))
}

/// Relative variance `(1 - p) / p` of the direct Monte Carlo indicator.
pub fn direct_mc_relative_variance(p: f64) -> f64 {
    (1.0 - p) / p
}
