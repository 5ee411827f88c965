use rayon::prelude::*;

use super::Welford;
use crate::{Error, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "FAILPROB_WORKERS";

/// Samples per reduction block. Blocks are the unit of parallel work and are
/// merged in index order, so the result does not depend on scheduling.
const BLOCK: u64 = 256;

/// Largest tolerated fraction of discarded samples.
pub const MAX_DISCARD_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub stats: Welford,
    pub hits: u64,
    pub discarded: u64,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.stats.merge(&other.stats);
        self.hits += other.hits;
        self.discarded += other.discarded;
    }
}

/// Outcome of one sample: `Some((value, hit))` or `None` when discarded.
pub type Outcome = Option<(f64, bool)>;

/// Evaluates `sample(i)` for `i in 0..n` in parallel blocks and reduces them
/// in a fixed order.
pub fn stream<F>(n: u64, sample: F) -> Result<Tally>
where
    F: Fn(u64) -> Result<Outcome> + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let partial: Vec<Tally> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut t = Tally::default();
            for i in blk * BLOCK..((blk + 1) * BLOCK).min(n) {
                match sample(i)? {
                    Some((v, hit)) => {
                        t.stats.push(v);
                        t.hits += hit as u64;
                    }
                    None => t.discarded += 1,
                }
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    let mut total = Tally::default();
    partial.iter().for_each(|t| total.merge(t));
    if total.discarded as f64 > MAX_DISCARD_FRACTION * n as f64 {
        return Err(Error::TooManyDiscards { discarded: total.discarded, total: n });
    }
    Ok(total)
}

/// Worker count from the explicit setting, else from [`WORKERS_ENV`].
pub fn resolve_workers(explicit: Option<usize>) -> Result<Option<usize>> {
    if let Some(w) = explicit {
        return if w == 0 { Err(Error::config("workers", "must be at least 1")) } else { Ok(Some(w)) };
    }
    match std::env::var(WORKERS_ENV) {
        Ok(s) if !s.trim().is_empty() => match s.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(Some(w)),
            _ => Err(Error::config(WORKERS_ENV, format!("expected a positive integer, got `{s}`"))),
        },
        _ => Ok(None),
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match resolve_workers(workers)? {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?
            .install(f),
        None => f(),
    }
}
