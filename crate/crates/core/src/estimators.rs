//! Turning simulations into verdicts: binomial confidence intervals,
//! Kolmogorov–Smirnov distances, tail and moment estimates, ergodic
//! averages and the random-difference-equation diagnostics of the renewal
//! sequence.
//!
//! Monte Carlo drivers come in two layers: a per-path function taking an
//! explicit RNG, and a sequential aggregate that gives path `i` the stream
//! `task_rng(cfg.seed, i)`. Parallel drivers reuse the per-path layer with
//! the same stream assignment.

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::laws::{iterated_log, open_unit, rayleigh_cdf};
use crate::numerics::RunningStats;
use crate::regeneration::{CyclePool, RenewalSequence};
use crate::rng::task_rng;
use crate::sde::{drift_r, hybrid_endpoint, integrate_r_endpoint};
use crate::{Error, IntegratorConfig, PathKind, Result, TrajectoryGrid};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

/// A binomial proportion with its Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Proportion {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub n: u64,
}

impl Proportion {
    pub fn new(successes: u64, n: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, n);
        let p_hat = if n == 0 { 0.0 } else { successes as f64 / n as f64 };
        Self { p_hat, ci_low, ci_high, successes, n }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }

    /// Binomial standard error `√(p̂(1-p̂)/n)`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.n as f64).sqrt()
    }
}

/// Empirical survival `P(T ≥ t)` of the cycle time on a grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TailEstimate {
    pub t_grid: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub ci_low: Vec<f64>,
    /// Wilson upper bound plus `trunc_bias`, capped at 1.
    pub ci_high: Vec<f64>,
    /// Mean `err_bound` of the pool: recorded `T` can only be too small.
    pub trunc_bias: f64,
    pub n: usize,
}

pub fn estimate_t_tail(pool: &CyclePool, t_grid: &[f64]) -> Result<TailEstimate> {
    if pool.is_empty() {
        return Err(Error::EmptySource);
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("t_grid must be strictly increasing"));
    }
    let mut times: Vec<f64> = pool.records().iter().map(|c| c.t).collect();
    times.sort_by(f64::total_cmp);
    let n = times.len();
    let trunc_bias = pool.records().iter().map(|c| c.err_bound).sum::<f64>() / n as f64;
    let mut est = TailEstimate {
        t_grid: t_grid.to_vec(),
        p_hat: Vec::with_capacity(t_grid.len()),
        ci_low: Vec::with_capacity(t_grid.len()),
        ci_high: Vec::with_capacity(t_grid.len()),
        trunc_bias,
        n,
    };
    for &t in t_grid {
        let below = times.partition_point(|&x| x < t);
        let p = Proportion::new((n - below) as u64, n as u64);
        est.p_hat.push(p.p_hat);
        est.ci_low.push(p.ci_low);
        est.ci_high.push((p.ci_high + trunc_bias).min(1.0));
    }
    Ok(est)
}

/// `P(T ≤ t)` over the pool.
pub fn estimate_t_lower(pool: &CyclePool, t: f64) -> Result<Proportion> {
    if pool.is_empty() {
        return Err(Error::EmptySource);
    }
    let hits = pool.records().iter().filter(|c| c.t <= t).count();
    Ok(Proportion::new(hits as u64, pool.len() as u64))
}

/// One-sample (or two-sample) Kolmogorov–Smirnov statistic with the
/// asymptotic `α = 0.01` critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsReport {
    pub d_n: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl KsReport {
    fn new(d_n: f64, n: usize, threshold: f64) -> Self {
        Self { d_n, n, threshold, pass: d_n < threshold }
    }
}

/// Critical value `1.63/√n`.
pub fn ks_threshold(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsReport> {
    let n = samples.len();
    if n < 10 {
        return Err(Error::TooFewSamples { need: 10, got: n });
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    Ok(KsReport::new(d.clamp(0.0, 1.0), n, ks_threshold(n)))
}

/// Two-sample statistic `sup |F_a - F_b|`; the threshold is
/// `1.63 √((n+m)/(nm))`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsReport> {
    for s in [a, b] {
        if s.len() < 10 {
            return Err(Error::TooFewSamples { need: 10, got: s.len() });
        }
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let threshold = 1.63 * ((na + nb) / (na * nb)).sqrt();
    Ok(KsReport::new(d, xa.len().min(xb.len()), threshold))
}

/// `R(t)/√t` from `r0`, with the hybrid integrator: geometric time away from
/// the unit circle, refined natural time near it. A plain geometric step
/// from the circle would be thrown out by the singular drift.
pub fn rayleigh_scaled_endpoint<G: Rng + ?Sized>(
    r0: f64,
    t: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<f64> {
    Ok(hybrid_endpoint(r0, t, cfg, rng)? / t.sqrt())
}

fn check_rayleigh_inputs(t: f64, n_paths: usize) -> Result<()> {
    if !(t >= 100.0 && t.is_finite()) {
        return Err(Error::InvalidInput("Rayleigh limit check needs t >= 100"));
    }
    if n_paths < 1000 {
        return Err(Error::TooFewSamples { need: 1000, got: n_paths });
    }
    Ok(())
}

/// KS distance of `R(t)/√t` to the Rayleigh law over `n_paths` paths.
pub fn rayleigh_limit_check(r0: f64, t: f64, n_paths: usize, cfg: &IntegratorConfig) -> Result<KsReport> {
    check_rayleigh_inputs(t, n_paths)?;
    let samples = (0..n_paths as u64)
        .map(|i| rayleigh_scaled_endpoint(r0, t, cfg, &mut task_rng(cfg.seed, i)))
        .collect::<Result<Vec<_>>>()?;
    rayleigh_limit_report(t, &samples)
}

/// The Rayleigh KS report for precomputed scaled endpoints.
pub fn rayleigh_limit_report(t: f64, samples: &[f64]) -> Result<KsReport> {
    check_rayleigh_inputs(t, samples.len())?;
    let mut rep = ks_distance(samples, rayleigh_cdf)?;
    rep.threshold = 0.05;
    rep.pass = rep.d_n < rep.threshold;
    Ok(rep)
}

/// Trapezoidal time average of `f` along an `X` path.
///
/// Accumulated as `f(X_0)` plus the average deviation from it, so that a
/// constant `f` is reproduced exactly.
pub fn ergodic_average<F: Fn(f64) -> f64>(x_path: &TrajectoryGrid, f: F) -> Result<f64> {
    if x_path.kind() != PathKind::X {
        return Err(Error::InvalidInput("ergodic average needs an X path"));
    }
    let (t, v) = (x_path.times(), x_path.values());
    let span = t[t.len() - 1] - t[0];
    if !(span >= 10.0) {
        return Err(Error::InvalidInput("ergodic average needs a geometric horizon of at least 10"));
    }
    let f0 = f(v[0]);
    let mut acc = 0.0;
    let mut prev = 0.0;
    for i in 1..t.len() {
        let cur = f(v[i]) - f0;
        acc += 0.5 * (prev + cur) * (t[i] - t[i - 1]);
        prev = cur;
    }
    Ok(f0 + acc / span)
}

/// Whether `R` from `r0` reaches `b` before `a`.
///
/// Euler steps of `cfg.dt_natural`; between grid points each barrier is
/// crossed with the Brownian-bridge probability `exp(-2 d_0 d_1 / dt)`, where
/// `d_0, d_1` are the distances of the endpoints to the barrier.
pub fn exit_upper_first<G: Rng + ?Sized>(
    a: f64,
    r0: f64,
    b: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<bool> {
    if !(a > 1.0 && a < r0 && r0 < b && b.is_finite()) {
        return Err(Error::InvalidInput("exit simulation needs 1 < a < r0 < b"));
    }
    cfg.validate()?;
    let dt = cfg.dt_natural;
    let sdt = dt.sqrt();
    let (mut x, mut time) = (r0, 0.0);
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let y = x + drift_r(x) * dt + sdt * z;
        time += dt;
        if !y.is_finite() {
            return Err(Error::NonFinite { time });
        }
        if y <= a {
            return Ok(false);
        }
        if y >= b {
            return Ok(true);
        }
        let p_low = (-2.0 * (x - a) * (y - a) / dt).exp();
        let p_up = (-2.0 * (b - x) * (b - y) / dt).exp();
        if p_low + p_up > 1e-300 {
            let w = open_unit(rng);
            if w < p_low {
                return Ok(false);
            }
            if w < p_low + p_up {
                return Ok(true);
            }
        }
        x = y;
    }
}

/// Frequency of exiting `(a, b)` through `b`, with its Wilson interval.
pub fn exit_prob_mc(a: f64, r0: f64, b: f64, n_paths: usize, cfg: &IntegratorConfig) -> Result<Proportion> {
    if n_paths < 1000 {
        return Err(Error::TooFewSamples { need: 1000, got: n_paths });
    }
    let mut hits = 0u64;
    for i in 0..n_paths as u64 {
        if exit_upper_first(a, r0, b, cfg, &mut task_rng(cfg.seed, i))? {
            hits += 1;
        }
    }
    Ok(Proportion::new(hits, n_paths as u64))
}

/// Sample means of `1/ln R(t)` and `R(t)²` against their exact values
/// `1/ln r0` and `r0² + 2t(1 + 1/ln r0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentReport {
    pub r0: f64,
    pub t: f64,
    pub n: u64,
    pub inv_log_mean: f64,
    pub inv_log_se: f64,
    pub inv_log_target: f64,
    pub square_mean: f64,
    pub square_se: f64,
    pub square_target: f64,
}

impl MomentReport {
    pub fn from_endpoints(r0: f64, t: f64, endpoints: &[f64]) -> Result<Self> {
        if !(r0 > 1.0) {
            return Err(Error::InvalidInput("moment identities need r0 > 1"));
        }
        if endpoints.len() < 2 {
            return Err(Error::TooFewSamples { need: 2, got: endpoints.len() });
        }
        let inv: RunningStats = endpoints.iter().map(|r| 1.0 / r.ln()).collect();
        let sq: RunningStats = endpoints.iter().map(|r| r * r).collect();
        let l = r0.ln();
        Ok(Self {
            r0,
            t,
            n: inv.count(),
            inv_log_mean: inv.mean(),
            inv_log_se: inv.std_error(),
            inv_log_target: 1.0 / l,
            square_mean: sq.mean(),
            square_se: sq.std_error(),
            square_target: r0 * r0 + 2.0 * t * (1.0 + 1.0 / l),
        })
    }

    /// `|mean - target|` in standard errors for the martingale.
    pub fn inv_log_z(&self) -> f64 {
        (self.inv_log_mean - self.inv_log_target).abs() / self.inv_log_se
    }

    /// `|mean - target|` in standard errors for the second moment.
    pub fn square_z(&self) -> f64 {
        (self.square_mean - self.square_target).abs() / self.square_se
    }
}

/// Natural-time endpoints of `n_paths` paths, then their [`MomentReport`].
pub fn moment_check(r0: f64, t: f64, n_paths: usize, cfg: &IntegratorConfig) -> Result<MomentReport> {
    let ends = (0..n_paths as u64)
        .map(|i| integrate_r_endpoint(r0, t, cfg, &mut task_rng(cfg.seed, i)))
        .collect::<Result<Vec<_>>>()?;
    MomentReport::from_endpoints(r0, t, &ends)
}

/// Diagnostics of `S_n = α_n S_{n-1} + β_n` with `α = r^{-2U}`,
/// `β = T' r^{-2U}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RdeReport {
    /// Mean of `ln α_i`.
    pub a_hat: f64,
    pub a_se: f64,
    pub t_grid: Vec<f64>,
    /// `P̂(β > t) ln t` on `t_grid`.
    pub b_hat: Vec<f64>,
    /// `min_{i ∈ (√n, n]} S_i ln₂ i`, 1-based `i`.
    pub beta0_hat: f64,
    pub beta0_index: usize,
    pub n: usize,
}

pub fn rde_diagnostics(seq: &RenewalSequence, t_grid: &[f64]) -> Result<RdeReport> {
    let n = seq.len();
    if n < 1000 {
        return Err(Error::TooFewSamples { need: 1000, got: n });
    }
    let ln_r = seq.ln_r;
    let ln_alpha = |i: usize| -2.0 * seq.u[i] * ln_r;
    let a: RunningStats = (0..n).map(ln_alpha).collect();
    let mut ln_beta: Vec<f64> = (0..n).map(|i| seq.ln_tp[i] + ln_alpha(i)).collect();
    ln_beta.sort_by(f64::total_cmp);
    let b_hat = t_grid
        .iter()
        .map(|&t| {
            let lt = t.ln();
            let above = n - ln_beta.partition_point(|&x| x <= lt);
            above as f64 / n as f64 * lt
        })
        .collect();
    let start = (n as f64).sqrt().floor() as usize + 1;
    let (mut beta0_hat, mut beta0_index) = (f64::INFINITY, 0);
    for i in start..=n {
        let v = seq.ln_s[i - 1].exp() * iterated_log(2, i as f64);
        if v < beta0_hat {
            beta0_hat = v;
            beta0_index = i;
        }
    }
    Ok(RdeReport { a_hat: a.mean(), a_se: a.std_error(), t_grid: t_grid.to_vec(), b_hat, beta0_hat, beta0_index, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{rayleigh_median, CycleLawParams};
    use crate::regeneration::{assemble_renewal, CycleDraw, CycleRecord, FromFn};
    use crate::sde::integrate_x;

    fn pool_of_times(ts: &[f64]) -> CyclePool {
        let p = CycleLawParams::new(2.0).unwrap();
        let recs = ts.iter().map(|&t| CycleRecord::from_parts(&p, t / 2.0, t, 1.5, 3.0, 30).unwrap()).collect();
        CyclePool::new(recs, p, 30, 0).unwrap()
    }

    #[test]
    fn wilson_coverage_is_calibrated() {
        let (p, n, reps) = (0.1, 1000u64, 1000u64);
        let mut rng = task_rng(1, 0);
        let covered = (0..reps)
            .filter(|_| {
                let k = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
                Proportion::new(k, n).contains(p)
            })
            .count() as f64
            / reps as f64;
        assert!((0.93..=0.97).contains(&covered), "{covered}");
        assert_eq!(wilson_interval(0, 10).0, 0.0);
        assert_eq!(wilson_interval(10, 10).1, 1.0);
    }

    #[test]
    fn tail_of_constant_times() {
        let est = estimate_t_tail(&pool_of_times(&[5.0; 20]), &[1.0, 10.0]).unwrap();
        assert_eq!(est.p_hat, [1.0, 0.0]);
        for i in 0..2 {
            assert!(est.ci_low[i] <= est.p_hat[i] && est.p_hat[i] <= est.ci_high[i] && est.ci_high[i] <= 1.0);
        }
        assert!((est.trunc_bias - 1.5f64.log2() / 30.0).abs() < 1e-15);
        assert!(estimate_t_tail(&pool_of_times(&[5.0; 20]), &[10.0, 1.0]).is_err());
        let empty = CyclePool::new(Vec::new(), CycleLawParams::new(2.0).unwrap(), 30, 0).unwrap();
        assert_eq!(estimate_t_tail(&empty, &[1.0]).unwrap_err(), Error::EmptySource);
    }

    #[test]
    fn tail_is_non_increasing() {
        let ts: Vec<f64> = (1..=500).map(|i| (i as f64 * 0.37).sin().abs() * 100.0 + 0.1).collect();
        let grid: Vec<f64> = (0..60).map(|i| i as f64 * 2.0).collect();
        let est = estimate_t_tail(&pool_of_times(&ts), &grid).unwrap();
        assert!(est.p_hat.windows(2).all(|w| w[1] <= w[0]));
        let low = estimate_t_lower(&pool_of_times(&ts), 50.0).unwrap();
        let high_at = est.t_grid.iter().position(|&t| t == 50.0).unwrap();
        let ties = ts.iter().filter(|&&t| t == 50.0).count() as f64 / 500.0;
        assert!((low.p_hat + est.p_hat[high_at] - 1.0 - ties).abs() < 1e-12);
    }

    #[test]
    fn ks_calibration_and_extremes() {
        let mut rng = task_rng(2, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let rep = ks_distance(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.threshold - 0.0163).abs() < 1e-12);
        let zeros = [0.0; 20];
        assert_eq!(ks_distance(&zeros, |x| x.clamp(0.0, 1.0)).unwrap().d_n, 1.0);
        assert_eq!(ks_distance(&zeros[..5], |x| x).unwrap_err(), Error::TooFewSamples { need: 10, got: 5 });

        let ys: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&xs, &ys).unwrap().d_n < 0.03);
        let shifted: Vec<f64> = ys.iter().map(|y| y + 0.5).collect();
        assert!((ks_two_sample(&xs, &shifted).unwrap().d_n - 0.5).abs() < 0.02);
    }

    #[test]
    fn ergodic_average_of_constants_is_exact() {
        let t: Vec<f64> = (0..=1234).map(|i| i as f64 * 0.01).collect();
        let v: Vec<f64> = t.iter().map(|s| 1.0 + (3.0 * s).sin().abs()).collect();
        let path = TrajectoryGrid::new(t, v, PathKind::X).unwrap();
        assert_eq!(ergodic_average(&path, |_| 1.0).unwrap(), 1.0);
        assert_eq!(ergodic_average(&path, |_| 0.3).unwrap(), 0.3);
        let short = TrajectoryGrid::new(alloc::vec![0.0, 1.0], alloc::vec![1.0, 1.0], PathKind::X).unwrap();
        assert!(ergodic_average(&short, |x| x).is_err());
    }

    #[test]
    fn ergodic_median_indicator() {
        let path = integrate_x(1.0, 1e3, 0.0, &IntegratorConfig::default(), &mut task_rng(3, 0)).unwrap();
        let m = rayleigh_median();
        let frac = ergodic_average(&path, |x| if x <= m { 1.0 } else { 0.0 }).unwrap();
        assert!((frac - 0.5).abs() < 0.05, "{frac}");
    }

    #[test]
    fn exit_near_lower_barrier_is_rare() {
        let cfg = IntegratorConfig::default();
        let p = exit_prob_mc(2.0, 2.002, 16.0, 1000, &cfg).unwrap();
        assert!(p.p_hat < 0.01, "{p:?}");
        assert!(exit_prob_mc(2.0, 4.0, 16.0, 10, &cfg).is_err());
        assert!(exit_upper_first(2.0, 1.5, 16.0, &cfg, &mut task_rng(0, 0)).is_err());
    }

    #[test]
    fn moment_report_targets() {
        let rep = MomentReport::from_endpoints(2.0, 1.0, &[2.0, 3.0, 4.0]).unwrap();
        assert!((rep.square_target - 8.885_390_081_777_927).abs() < 1e-12);
        assert!((rep.inv_log_target - 1.442_695_040_888_963_4).abs() < 1e-15);
        assert!(MomentReport::from_endpoints(1.0, 1.0, &[2.0, 3.0]).is_err());
    }

    #[test]
    fn rde_on_constant_exponents() {
        let p = CycleLawParams::new(2.0).unwrap();
        let u0 = 0.37;
        let mut src = FromFn::new(&p, |i| CycleDraw { u: u0, ln_tp: (i % 7) as f64 });
        let seq = assemble_renewal(&mut src, 2000, &mut task_rng(4, 0)).unwrap();
        let rep = rde_diagnostics(&seq, &[10.0, 100.0]).unwrap();
        assert_eq!(rep.a_hat, -2.0 * u0 * 2f64.ln());
        assert!(rep.beta0_hat > 0.0 && rep.beta0_hat.is_finite());
        assert!(rep.beta0_index > 44 && rep.beta0_index <= 2000);
        assert!(rde_diagnostics(&assemble_renewal(&mut src, 10, &mut task_rng(4, 0)).unwrap(), &[]).is_err());
    }

    #[test]
    fn rayleigh_preconditions() {
        let cfg = IntegratorConfig::default();
        assert!(rayleigh_limit_check(1.0, 1e3, 999, &cfg).is_err());
        assert!(rayleigh_limit_check(1.0, 50.0, 1000, &cfg).is_err());
    }
}
