//! Standard normal tails in log space.

use std::f64::consts::{PI, SQRT_2};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Scaled complementary error function `exp(t^2) erfc(t)`.
pub fn erfcx(t: f64) -> f64 {
    if t < 3.0 {
        // erfc does not underflow here and exp(t^2) stays below e^9
        return (t * t).exp() * libm::erfc(t);
    }
    // Continued fraction erfcx(t) = 1/sqrt(pi) * 1/(t + (1/2)/(t + 1/(t + (3/2)/(t + ...))))
    // evaluated with the modified Lentz method.
    let tiny = 1e-300;
    let mut f = t;
    let mut c = t;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = t + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = t + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// `log P(Z > x)` for a standard normal `Z`, finite for every finite `x`.
pub fn log_upper_tail(x: f64) -> f64 {
    if x < 0.0 {
        (-0.5 * libm::erfc(-x / SQRT_2)).ln_1p()
    } else {
        (0.5 * erfcx(x / SQRT_2)).ln() - 0.5 * x * x
    }
}

/// `log phi(x)` of the standard normal density.
#[inline]
pub fn log_density(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * PI).ln()
}
