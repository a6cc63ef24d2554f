//! Parallel drivers over the core kernels. Task `i` of every driver uses the
//! stream `task_rng(seed, i)`, exactly like the sequential helpers of
//! `moustache_core`, so both produce the same numbers.

use moustache_core::estimators::{exit_upper_first, rayleigh_scaled_endpoint, MomentReport, Proportion};
use moustache_core::regeneration::{assemble_renewal, cfg_fingerprint, simulate_cycle, Bootstrap, InOrder};
use moustache_core::rng::task_rng;
use moustache_core::sde::{coupled_triple, integrate_r_endpoint, integrate_x};
use moustache_core::{CoupledTriple, CycleLawParams, CyclePool, RenewalSequence, TrajectoryGrid};

use crate::config::ExperimentConfig;
use crate::error::{AppError, AppResult};
use crate::parallel::run_indexed;

pub fn params(cfg: &ExperimentConfig) -> AppResult<CycleLawParams> {
    CycleLawParams::new(cfg.r).map_err(|e| AppError::Config(e.to_string()))
}

/// `n` cycles at the configured `r` and `k`.
pub fn cycle_pool(cfg: &ExperimentConfig, n: usize) -> AppResult<CyclePool> {
    let p = params(cfg)?;
    let ic = &cfg.integrator;
    let records = run_indexed(n, cfg.workers, ic.seed, |_, rng| simulate_cycle(&p, cfg.k, ic, rng))?;
    Ok(CyclePool::new(records, p, cfg.k, cfg_fingerprint(ic))?)
}

/// `R(t)` from `r0` on `n` independent paths.
pub fn radial_endpoints(cfg: &ExperimentConfig, r0: f64, t: f64, n: usize) -> AppResult<Vec<f64>> {
    let ic = &cfg.integrator;
    run_indexed(n, cfg.workers, ic.seed, |_, rng| integrate_r_endpoint(r0, t, ic, rng))
}

pub fn moments(cfg: &ExperimentConfig, r0: f64, t: f64, n: usize) -> AppResult<MomentReport> {
    let ends = radial_endpoints(cfg, r0, t, n)?;
    Ok(MomentReport::from_endpoints(r0, t, &ends)?)
}

/// `R(t)/√t` from `r0`, integrated in geometric time.
pub fn rayleigh_samples(cfg: &ExperimentConfig, r0: f64, t: f64, n: usize) -> AppResult<Vec<f64>> {
    let ic = &cfg.integrator;
    run_indexed(n, cfg.workers, ic.seed, |_, rng| rayleigh_scaled_endpoint(r0, t, ic, rng))
}

/// Frequency of leaving `(a, b)` through `b` from `r0`.
pub fn exit_frequency(cfg: &ExperimentConfig, a: f64, r0: f64, b: f64, n: usize) -> AppResult<Proportion> {
    let ic = &cfg.integrator;
    let hits = run_indexed(n, cfg.workers, ic.seed, |_, rng| exit_upper_first(a, r0, b, ic, rng))?;
    Ok(Proportion::new(hits.iter().filter(|&&h| h).count() as u64, n as u64))
}

/// One `X` path over geometric time `[0, horizon]` on stream 0.
pub fn geometric_path(cfg: &ExperimentConfig, x0: f64, horizon: f64) -> AppResult<TrajectoryGrid> {
    Ok(integrate_x(x0, horizon, 0.0, &cfg.integrator, &mut task_rng(cfg.seed(), 0))?)
}

pub fn coupled(cfg: &ExperimentConfig, delta: f64, horizon: f64, n: usize) -> AppResult<Vec<CoupledTriple>> {
    let ic = &cfg.integrator;
    run_indexed(n, cfg.workers, ic.seed, |_, rng| coupled_triple(delta, horizon, ic, rng))
}

/// Renewal sequence from `n` fresh cycles, simulated in parallel and
/// assembled in index order.
pub fn live_renewal(cfg: &ExperimentConfig, n: usize) -> AppResult<RenewalSequence> {
    let pool = cycle_pool(cfg, n)?;
    in_order_renewal(&pool, n)
}

pub fn in_order_renewal(pool: &CyclePool, n: usize) -> AppResult<RenewalSequence> {
    // InOrder ignores the generator.
    Ok(assemble_renewal(&mut InOrder::new(pool), n, &mut task_rng(0, 0))?)
}

/// `n` cycles resampled from `pool`, on stream 0 of `seed`.
pub fn bootstrap_renewal(pool: &CyclePool, n: usize, seed: u64) -> AppResult<RenewalSequence> {
    Ok(assemble_renewal(&mut Bootstrap::new(pool)?, n, &mut task_rng(seed, 0))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use moustache_core::estimators::exit_prob_mc;
    use moustache_core::regeneration::simulate_pool;

    fn small() -> ExperimentConfig {
        ExperimentConfig { k: 6, workers: 3, ..Default::default() }
    }

    #[test]
    fn pool_matches_sequential_kernel() {
        let cfg = small();
        let par = cycle_pool(&cfg, 12).unwrap();
        let seq = simulate_pool(&params(&cfg).unwrap(), cfg.k, 12, &cfg.integrator).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn exit_matches_sequential_kernel() {
        let mut cfg = small();
        cfg.integrator.dt_natural = 1e-2;
        let par = exit_frequency(&cfg, 2.0, 3.0, 5.0, 1000).unwrap();
        let seq = exit_prob_mc(2.0, 3.0, 5.0, 1000, &cfg.integrator).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn live_renewal_is_the_in_order_assembly() {
        let cfg = small();
        let live = live_renewal(&cfg, 10).unwrap();
        let pool = cycle_pool(&cfg, 10).unwrap();
        assert_eq!(live, in_order_renewal(&pool, 10).unwrap());
        assert_eq!(live.u, pool.records().iter().map(|c| c.u).collect::<Vec<_>>());
    }
}
