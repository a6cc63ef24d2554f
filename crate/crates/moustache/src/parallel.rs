//! Deterministic fan-out of indexed Monte Carlo tasks.
//!
//! Task `i` owns the random stream `task_rng(seed, i)`, and results are
//! returned in index order, so the output does not depend on `workers`.

use moustache_core::rng::{task_rng, StreamRng};
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Runs `f(i, rng_i)` for `i in 0..n` on `workers` threads. On failure, the
/// error of the lowest failing index is returned.
pub fn run_indexed<T, F>(n: usize, workers: usize, seed: u64, f: F) -> AppResult<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> moustache_core::Result<T> + Sync,
{
    let task = |i: usize| f(i as u64, &mut task_rng(seed, i as u64));
    let results: Vec<moustache_core::Result<T>> = if workers <= 1 {
        (0..n).map(task).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| AppError::Config(format!("cannot start {workers} workers: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(task).collect())
    };
    results.into_iter().map(|r| r.map_err(AppError::from)).collect()
}
