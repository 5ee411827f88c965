use std::fmt::Write;

use super::{Method, Tally};

/// Outcome of one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub method: Method,
    pub b: f64,
    pub p_hat: f64,
    /// One-sample standard deviation (population convention).
    pub std: f64,
    pub rel_err: f64,
    /// Requested samples; statistics use `n - discarded` of them.
    pub n: u64,
    pub hits: u64,
    pub discarded: u64,
    pub seed: u64,
    pub wall_time_s: f64,
    /// `rel_err` is `sqrt(1/p - 1)` at a reference probability because direct
    /// Monte Carlo saw no hits.
    pub zero_hit_convention: bool,
}

impl EstimatorResult {
    pub(crate) fn from_tally(method: Method, b: f64, n: u64, seed: u64, tally: &Tally, wall_time_s: f64) -> Self {
        let (p_hat, std) = match method {
            // exact hit frequency; Welford would only agree to rounding
            Method::DirectMc => {
                let p = tally.hits as f64 / tally.stats.count().max(1) as f64;
                (p, (p * (1.0 - p)).sqrt())
            }
            Method::ImportanceSampling => (tally.stats.mean().max(0.0), tally.stats.std()),
        };
        let rel_err = if p_hat > 0.0 { std / p_hat } else { f64::INFINITY };
        EstimatorResult {
            method,
            b,
            p_hat,
            std,
            rel_err,
            n,
            hits: tally.hits,
            discarded: tally.discarded,
            seed,
            wall_time_s,
            zero_hit_convention: false,
        }
    }

    /// For a zero-hit direct Monte Carlo result, reports the relative error
    /// `sqrt(1/p - 1)` of the indicator at reference probability `p`.
    pub fn with_reference_probability(mut self, p: f64) -> Self {
        if self.method == Method::DirectMc && self.hits == 0 && p > 0.0 && p < 1.0 {
            self.rel_err = (1.0 / p - 1.0).sqrt();
            self.zero_hit_convention = true;
        }
        self
    }

    /// Samples that entered the statistics.
    pub fn accepted(&self) -> u64 {
        self.n - self.discarded
    }

    /// Standard error of `p_hat`.
    pub fn standard_error(&self) -> f64 {
        self.std / (self.accepted().max(1) as f64).sqrt()
    }

    pub const CSV_HEADER: &'static str = "method,b,p_hat,std,rel_err,n,hits,discarded,seed,wall_time_s";

    /// CSV row; the wall time column stays empty unless `timing` is set so
    /// that repeated runs are byte-identical.
    pub fn csv_row(&self, timing: bool) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},",
            self.method,
            fmt_num(self.b),
            fmt_num(self.p_hat),
            fmt_num(self.std),
            fmt_num(self.rel_err),
            self.n,
            self.hits,
            self.discarded,
            self.seed
        )
        .unwrap();
        if timing {
            write!(s, "{:.3}", self.wall_time_s).unwrap();
        }
        s
    }
}

/// Shortest round-trip representation in scientific notation.
pub(crate) fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
