//! Verification suites.
//!
//! `exact` checks closed forms and deterministic algebra in well under a
//! second. `acceptance` runs the Monte Carlo criteria A1–A12 at the sizes
//! given by an [`AcceptanceScale`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use moustache_core::estimators::{
    estimate_t_lower, estimate_t_tail, ergodic_average, ks_distance, rayleigh_limit_report,
    rde_diagnostics, wilson_interval, Proportion,
};
use moustache_core::laws::{
    exit_prob, iterated_log, rayleigh_cdf, rayleigh_median, tail_v, tail_v_series, truncated_u_cdf, RayleighLaw,
};
use moustache_core::numerics::ln_add_exp;
use moustache_core::regeneration::{assemble_renewal, recursion_residual, CycleDraw, FromFn};
use moustache_core::rng::{splitmix64, task_rng};
use moustache_core::{CycleLawParams, CyclePool};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{AppError, AppResult};
use crate::experiments as exp;
use crate::oracles::{
    finite_t_rayleigh_cdf, FINITE_T_RAYLEIGH_T, FINITE_T_SECOND_MOMENT, KILLED_INV_LOG_R2_T1, KILLED_SQUARE_R2_T1,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A diagnostic: reported, never failing the suite.
    Reported,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Reported => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub title: String,
    pub status: Status,
    pub detail: String,
    /// Named statistics behind the verdict.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl CheckResult {
    fn new(id: &str, title: &str, pass: bool, detail: String) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Self { id: id.into(), title: title.into(), status, detail, metrics: BTreeMap::new() }
    }

    fn reported(id: &str, title: &str, detail: String) -> Self {
        Self { status: Status::Reported, ..Self::new(id, title, true, detail) }
    }

    fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.into(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<4} {}  {}: {}", self.id, self.status, self.title, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.id.as_str()).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// `Err(Acceptance)` listing the failed checks.
    pub fn into_result(self) -> AppResult<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(AppError::Acceptance(format!("suite {} failed: {}", self.suite, self.failures().join(", "))))
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let fails = self.failures();
        if fails.is_empty() {
            write!(f, "suite {}: all checks passed", self.suite)
        } else {
            write!(f, "suite {}: {} failed ({})", self.suite, fails.len(), fails.join(", "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exact,
    Acceptance,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Self::Exact),
            "acceptance" => Ok(Self::Acceptance),
            _ => Err(format!("unknown suite {s:?} (expected exact or acceptance)")),
        }
    }
}

/// Constant cycles `U ≡ u`, `T' ≡ 1`: `S_n = q(1 - qⁿ)/(1 - q)` with
/// `q = r^{-2u}`, and `T_n = (r^{2un} - 1)/(r^{2u} - 1)`. Returns the worst
/// relative error of `S` and `T` over `n` steps, measured as the absolute
/// error of their logarithms.
fn geometric_sum_error(params: &CycleLawParams, u: f64, n: usize) -> AppResult<f64> {
    let mut src = FromFn::new(params, |_| CycleDraw { u, ln_tp: 0.0 });
    let seq = assemble_renewal(&mut src, n, &mut task_rng(0, 0))?;
    let ln_q = -2.0 * u * params.ln_r();
    let mut worst: f64 = 0.0;
    for i in 1..=n {
        let fi = i as f64;
        // ln S_i = ln q + ln(1 - q^i) - ln(1 - q)
        let ln_s = ln_q + (-(ln_q * fi).exp()).ln_1p() - (-ln_q.exp()).ln_1p();
        // ln T_i = ln(r^{2ui} - 1) - ln(r^{2u} - 1)
        let ln_t = -ln_q * fi + (-(ln_q * fi).exp()).ln_1p() - (-ln_q).exp_m1().ln();
        worst = worst.max((seq.ln_s[i - 1] - ln_s).abs()).max((seq.ln_t[i - 1] - ln_t).abs());
    }
    Ok(worst)
}

pub fn exact_suite(cfg: &ExperimentConfig) -> AppResult<SuiteReport> {
    let params = exp::params(cfg)?;
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    let mut v = 1.01;
    while v <= 100.0 {
        worst = worst.max((tail_v(v) - tail_v_series(v, 100_000)).abs());
        v *= 1.07;
    }
    let at2 = (tail_v(2.0) - (1.0 - std::f64::consts::LN_2)).abs();
    checks.push(CheckResult::new(
        "E1",
        "V tail: closed form vs series on [1.01, 100]",
        worst < 1e-10 && at2 < 1e-15,
        format!("max |diff| = {worst:.2e}, |P(V>2) - (1 - ln 2)| = {at2:.2e}"),
    ));

    let p = exit_prob(2.0, 4.0, 16.0)?;
    let ends = (exit_prob(2.0, 2.0, 16.0)?, exit_prob(2.0, 16.0, 16.0)?);
    checks.push(CheckResult::new(
        "E2",
        "exit probability (2, 4, 16) and endpoints",
        (p - 2.0 / 3.0).abs() < 1e-15 && ends == (0.0, 1.0),
        format!("p = {p:.17}, endpoints = {ends:?}"),
    ));

    let law = RayleighLaw;
    let worst = (1..100)
        .map(|i| i as f64 / 100.0)
        .map(|q| (law.cdf(law.quantile(q)) - q).abs())
        .fold(0.0, f64::max);
    let med = (rayleigh_median() - (2.0 * std::f64::consts::LN_2).sqrt()).abs();
    checks.push(CheckResult::new(
        "E3",
        "Rayleigh quantile/cdf inverse pair and median",
        worst < 1e-14 && med < 1e-15,
        format!("max |F(Q(q)) - q| = {worst:.2e}, median error {med:.2e}"),
    ));

    // Midpoint quantiles have KS distance exactly 1/(2n) from their law.
    let n = 1000;
    let mids: Vec<f64> = (0..n).map(|i| law.quantile((i as f64 + 0.5) / n as f64)).collect();
    let d = ks_distance(&mids, rayleigh_cdf)?.d_n;
    checks.push(CheckResult::new(
        "E4",
        "KS distance of a midpoint quantile grid",
        (d - 0.5 / n as f64).abs() < 1e-12,
        format!("D = {d:.15}, expected {:.15}", 0.5 / n as f64),
    ));

    let (lo, hi) = wilson_interval(0, 100);
    let (lo2, hi2) = wilson_interval(30, 100);
    let (lo3, hi3) = wilson_interval(70, 100);
    let sym = (lo2 - (1.0 - hi3)).abs().max((hi2 - (1.0 - lo3)).abs());
    checks.push(CheckResult::new(
        "E5",
        "Wilson interval: zero successes and symmetry",
        lo == 0.0 && hi > 0.0 && sym < 1e-15,
        format!("[0/100] = [{lo}, {hi:.6}], asymmetry {sym:.2e}"),
    ));

    let err = geometric_sum_error(&params, 1.0, 400)?;
    checks.push(CheckResult::new(
        "E6",
        "renewal assembly on constant cycles vs geometric sums",
        err < 1e-10,
        format!("max relative error {err:.2e} over 400 steps"),
    ));

    let mut rng = task_rng(cfg.seed(), 0);
    let mut src = FromFn::new(&params, |_| {
        use rand::Rng;
        CycleDraw { u: rng.random(), ln_tp: rng.random_range(-3.0..6.0) }
    });
    let seq = assemble_renewal(&mut src, 100_000, &mut task_rng(0, 0))?;
    let res = recursion_residual(&seq);
    checks.push(CheckResult::new(
        "E7",
        "S recursion residual on 1e5 synthetic cycles",
        res < 1e-10,
        format!("residual {res:.2e}"),
    ));

    let ee = std::f64::consts::E.powf(std::f64::consts::E);
    let il = [iterated_log(2, ee), iterated_log(3, 10.0), iterated_log(1, 0.5)];
    checks.push(CheckResult::new(
        "E8",
        "iterated logarithm convention",
        (il[0] - 1.0).abs() < 1e-15 && il[1] == 0.0 && il[2] == 0.0,
        format!("ln2(e^e) = {}, ln3(10) = {}, ln1(0.5) = {}", il[0], il[1], il[2]),
    ));

    let lse = ln_add_exp(1000.0, 1000.0) - (1000.0 + std::f64::consts::LN_2);
    checks.push(CheckResult::new(
        "E9",
        "log-sum-exp without overflow",
        lse.abs() < 1e-12 && ln_add_exp(f64::NEG_INFINITY, 1.5) == 1.5,
        format!("ln(e^1000 + e^1000) - (1000 + ln 2) = {lse:.2e}"),
    ));

    Ok(SuiteReport { suite: "exact".into(), seed: cfg.seed(), checks })
}

/// Sample sizes of the acceptance suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceScale {
    pub moment_paths: usize,
    /// Cycles in the shared pool (T tails, lower tail, bootstrap source).
    pub pool_cycles: usize,
    /// Leading cycles of the pool used for the U and V laws.
    pub law_cycles: usize,
    pub exit_paths: usize,
    pub rayleigh_paths: usize,
    pub rayleigh_t: f64,
    pub ergodic_horizon: f64,
    pub bootstrap_n: usize,
    pub coupled_paths: usize,
    pub rde_n: usize,
}

impl AcceptanceScale {
    pub fn full() -> Self {
        Self {
            moment_paths: 100_000,
            pool_cycles: 100_000,
            law_cycles: 10_000,
            exit_paths: 10_000,
            rayleigh_paths: 10_000,
            rayleigh_t: 1e3,
            ergodic_horizon: 1e3,
            bootstrap_n: 1_000_000,
            coupled_paths: 100,
            rde_n: 10_000,
        }
    }

    /// The smallest sizes the estimators accept; for exercising the
    /// plumbing, not for conclusions.
    pub fn smoke() -> Self {
        Self {
            moment_paths: 1_000,
            pool_cycles: 1_000,
            law_cycles: 1_000,
            exit_paths: 1_000,
            rayleigh_paths: 1_000,
            rayleigh_t: 100.0,
            ergodic_horizon: 20.0,
            bootstrap_n: 10_000,
            coupled_paths: 5,
            rde_n: 1_000,
        }
    }
}

type Line = AppResult<CheckResult>;

fn a1_a2(cfg: &ExperimentConfig, sc: &AcceptanceScale) -> AppResult<[CheckResult; 2]> {
    let m = exp::moments(cfg, 2.0, 1.0, sc.moment_paths)?;
    let z_inv = (m.inv_log_mean - KILLED_INV_LOG_R2_T1).abs() / m.inv_log_se;
    let z_sq = (m.square_mean - KILLED_SQUARE_R2_T1).abs() / m.square_se;
    let a1 = CheckResult::new(
        "A1",
        "E[1/ln R(1)] from r0 = 2 equals 1/ln 2 within 4 SE",
        m.inv_log_z() <= 4.0,
        format!(
            "mean {:.5} ± {:.5} vs {:.5} (z = {:.1}); killed-process oracle {KILLED_INV_LOG_R2_T1:.5} (z = {z_inv:.2}), n = {}",
            m.inv_log_mean, m.inv_log_se, m.inv_log_target, m.inv_log_z(), m.n
        ),
    )
    .metric("mean", m.inv_log_mean)
    .metric("z", m.inv_log_z())
    .metric("z_oracle", z_inv);
    let a2 = CheckResult::new(
        "A2",
        "E[R(1)²] from r0 = 2 equals 4 + 2(1 + 1/ln 2) within 4 SE",
        m.square_z() <= 4.0,
        format!(
            "mean {:.4} ± {:.4} vs {:.4} (z = {:.1}); killed-process oracle {KILLED_SQUARE_R2_T1:.4} (z = {z_sq:.2})",
            m.square_mean, m.square_se, m.square_target, m.square_z()
        ),
    )
    .metric("mean", m.square_mean)
    .metric("z", m.square_z())
    .metric("z_oracle", z_sq);
    Ok([a1, a2])
}

fn a3(laws: &CyclePool) -> Line {
    let us: Vec<f64> = laws.records().iter().map(|c| c.u).collect();
    let ks = ks_distance(&us, |x| x.clamp(0.0, 1.0))?;
    let thr = 1.63 / (us.len() as f64).sqrt();
    // Part of D is the record tracking stopping at r^k.
    let k = laws.k();
    let exact = ks_distance(&us, |x| truncated_u_cdf(x, k))?.d_n;
    Ok(CheckResult::new(
        "A3",
        "cycle U is Uniform(0, 1) (KS)",
        ks.d_n < thr,
        format!("D = {:.4} < {thr:.4} on {} cycles; D = {exact:.4} against the law truncated at k = {k}", ks.d_n, us.len()),
    )
    .metric("d", ks.d_n)
    .metric("d_truncated", exact)
    .metric("threshold", thr))
}

fn a4(laws: &CyclePool) -> Line {
    let n = laws.len() as u64;
    let above = laws.records().iter().filter(|c| c.v > 2.0).count() as u64;
    let p = Proportion::new(above, n);
    let target = 1.0 - std::f64::consts::LN_2;
    let tol = 3.0 * (target * (1.0 - target) / n as f64).sqrt() + 1.0 / laws.k() as f64;
    Ok(CheckResult::new(
        "A4",
        "P(V > 2) = 1 - ln 2",
        (p.p_hat - target).abs() <= tol,
        format!("p̂ = {:.4} vs {target:.4}, tolerance {tol:.4}", p.p_hat),
    ))
}

fn a5(cfg: &ExperimentConfig, sc: &AcceptanceScale) -> Line {
    let p = exp::exit_frequency(cfg, 2.0, 4.0, 16.0, sc.exit_paths)?;
    let target = exit_prob(2.0, 4.0, 16.0)?;
    Ok(CheckResult::new(
        "A5",
        "exit of (2, 16) from 4 through 16 has probability 2/3",
        p.contains(target),
        format!("p̂ = {:.4}, Wilson [{:.4}, {:.4}], n = {}", p.p_hat, p.ci_low, p.ci_high, p.n),
    ))
}

fn a6(pool: &CyclePool) -> Line {
    let est = estimate_t_tail(pool, &[1e3, 1e4])?;
    let ln_r = pool.params().ln_r();
    let ratios: Vec<f64> = est.t_grid.iter().zip(&est.p_hat).map(|(t, p)| p * t.ln() / ln_r).collect();
    Ok(CheckResult::new(
        "A6",
        "P(T ≥ t) ln t / ln r in [0.7, 1.3] at t = 1e3, 1e4",
        ratios.iter().all(|x| (0.7..=1.3).contains(x)),
        format!(
            "ratios {:.3}, {:.3} (p̂ = {:.5}, {:.5}), n = {}",
            ratios[0], ratios[1], est.p_hat[0], est.p_hat[1], est.n
        ),
    ))
}

fn a7(pool: &CyclePool) -> Line {
    let t = 0.2;
    let p = estimate_t_lower(pool, t)?;
    let stat = -2.0 * t * p.p_hat.ln();
    Ok(CheckResult::reported(
        "A7",
        "lower tail -2t ln P(T ≤ t) at t = 0.2 (band [0.5, 2.0])",
        format!(
            "{stat:.3} ({}), p̂ = {:.5} from {} of {}",
            if (0.5..=2.0).contains(&stat) { "inside" } else { "outside" },
            p.p_hat,
            p.successes,
            p.n
        ),
    ))
}

fn a8(cfg: &ExperimentConfig, sc: &AcceptanceScale) -> Line {
    let samples = exp::rayleigh_samples(cfg, 1.0, sc.rayleigh_t, sc.rayleigh_paths)?;
    let ks = rayleigh_limit_report(sc.rayleigh_t, &samples)?;
    let m2 = samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64;
    let mut detail = format!("D = {:.4}, n = {}, mean (R²/t) = {m2:.3} (Rayleigh: 2)", ks.d_n, ks.n);
    let mut line = CheckResult::new("A8", "R(t)/√t is Rayleigh at t = 1e3 (KS < 0.05)", ks.pass, String::new())
        .metric("d", ks.d_n)
        .metric("mean_square", m2);
    if sc.rayleigh_t == FINITE_T_RAYLEIGH_T {
        // The finite-t law itself, not its limit.
        let d = ks_distance(&samples, finite_t_rayleigh_cdf)?.d_n;
        let thr = 1.63 / (samples.len() as f64).sqrt();
        detail += &format!(
            "; against the exact law at this t: D = {d:.4} (threshold {thr:.4}), mean (R²/t) {FINITE_T_SECOND_MOMENT:.3}"
        );
        line = line.metric("d_oracle", d).metric("oracle_threshold", thr);
    }
    line.detail = detail;
    Ok(line)
}

fn a9(cfg: &ExperimentConfig, sc: &AcceptanceScale) -> Line {
    let path = exp::geometric_path(cfg, std::f64::consts::SQRT_2, sc.ergodic_horizon)?;
    let avg = ergodic_average(&path, |x| x * x)?;
    Ok(CheckResult::new(
        "A9",
        "time average of X² over geometric horizon 1e3 in [1.9, 2.1]",
        (1.9..=2.1).contains(&avg),
        format!("{avg:.4} over {} steps", path.len() - 1),
    ))
}

fn a10(cfg: &ExperimentConfig, sc: &AcceptanceScale, pool: &CyclePool) -> Line {
    let start = Instant::now();
    let seq = exp::bootstrap_renewal(pool, sc.bootstrap_n, cfg.seed())?;
    let secs = start.elapsed().as_secs_f64();
    let oracle = geometric_sum_error(pool.params(), 1.0, 400)?;
    let res = recursion_residual(&seq);
    let rde = rde_diagnostics(&seq, &[])?;
    let ok = secs < 10.0 && oracle < 1e-10 && res < 1e-10 && rde.beta0_hat.is_finite() && rde.beta0_hat > 0.0;
    Ok(CheckResult::new(
        "A10",
        "renewal assembler: speed, geometric-sum oracle, residual, β₀",
        ok,
        format!(
            "{} bootstrap cycles in {secs:.2} s; oracle error {oracle:.1e}; residual {res:.1e}; min S_i ln₂ i over (√n, n] = {:.4} at i = {}",
            seq.len(),
            rde.beta0_hat,
            rde.beta0_index
        ),
    ))
}

fn a11(cfg: &ExperimentConfig, sc: &AcceptanceScale) -> Line {
    let paths = exp::coupled(cfg, 1.0, 10.0, sc.coupled_paths)?;
    let violations: usize = paths.iter().map(|p| p.domination_violations()).sum();
    let points: usize = paths.iter().map(|p| p.r.len()).sum();
    Ok(CheckResult::new(
        "A11",
        "coupled BES² ≤ R at every grid point, horizon 10",
        violations == 0,
        format!("{violations} violations over {} paths, {points} grid points", paths.len()),
    ))
}

fn a12(pool: &CyclePool, sc: &AcceptanceScale) -> Line {
    let n = sc.rde_n.min(pool.len());
    let seq = exp::in_order_renewal(pool, n)?;
    let t = n as f64;
    let rde = rde_diagnostics(&seq, &[t])?;
    let target = -pool.params().ln_r();
    let z = (rde.a_hat - target).abs() / rde.a_se;
    let b_ratio = rde.b_hat[0] / pool.params().ln_r();
    Ok(CheckResult::new(
        "A12",
        "E ln α = -ln r within 3 SE (b̂ reported)",
        z <= 3.0,
        format!(
            "â = {:.4} ± {:.4} vs {target:.4} (z = {z:.2}); b̂({t:.0}) = {:.4} = {b_ratio:.3} ln r ({}), n = {n}",
            rde.a_hat,
            rde.a_se,
            rde.b_hat[0],
            if (0.5..=1.5).contains(&b_ratio) { "inside [0.5, 1.5]" } else { "outside [0.5, 1.5]" }
        ),
    ))
}

/// The configuration of one group of criteria: the master seed mixed with
/// `tag`, so that no two groups share random streams.
fn group_cfg(cfg: &ExperimentConfig, tag: u64) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.integrator.seed = splitmix64(cfg.seed() ^ splitmix64(tag));
    c
}

/// Runs A1–A12, calling `on_line` as each criterion completes.
///
/// A1/A2 share one sample, and A3, A4, A6, A7, A10 and A12 share one cycle
/// pool; every other criterion draws from its own seed.
pub fn acceptance_suite(
    cfg: &ExperimentConfig,
    sc: &AcceptanceScale,
    mut on_line: impl FnMut(&CheckResult),
) -> AppResult<SuiteReport> {
    let mut checks = Vec::new();
    let mut push = |c: CheckResult, checks: &mut Vec<CheckResult>| {
        on_line(&c);
        checks.push(c);
    };
    for c in a1_a2(&group_cfg(cfg, 1), sc)? {
        push(c, &mut checks);
    }
    let pool = exp::cycle_pool(&group_cfg(cfg, 3), sc.pool_cycles)?;
    let laws = pool.truncated(sc.law_cycles);
    push(a3(&laws)?, &mut checks);
    push(a4(&laws)?, &mut checks);
    push(a5(&group_cfg(cfg, 5), sc)?, &mut checks);
    push(a6(&pool)?, &mut checks);
    push(a7(&pool)?, &mut checks);
    push(a8(&group_cfg(cfg, 8), sc)?, &mut checks);
    push(a9(&group_cfg(cfg, 9), sc)?, &mut checks);
    push(a10(&group_cfg(cfg, 10), sc, &pool)?, &mut checks);
    push(a11(&group_cfg(cfg, 11), sc)?, &mut checks);
    push(a12(&pool, sc)?, &mut checks);
    Ok(SuiteReport { suite: "acceptance".into(), seed: cfg.seed(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_suite_passes_on_defaults() {
        let rep = exact_suite(&ExperimentConfig::default()).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.checks.len(), 9);
    }

    #[test]
    fn geometric_sum_oracle_is_tight() {
        let p = CycleLawParams::new(1.5).unwrap();
        let err = geometric_sum_error(&p, 0.7, 600).unwrap();
        assert!(err < 1e-10, "{err:e}");
    }

    #[test]
    fn failing_report_maps_to_acceptance_exit() {
        let rep = SuiteReport {
            suite: "x".into(),
            seed: 0,
            checks: vec![
                CheckResult::new("A1", "t", false, String::new()),
                CheckResult::reported("A7", "t", String::new()),
            ],
        };
        assert_eq!(rep.failures(), ["A1"]);
        assert_eq!(rep.into_result().unwrap_err().exit_code(), 4);
    }

    #[test]
    fn lines_are_one_per_check() {
        let c = CheckResult::new("A3", "uniform", true, "D = 0.01".into()).metric("d", 0.01);
        assert_eq!(c.to_string(), "A3   PASS  uniform: D = 0.01");
        assert_eq!(c.get("d"), Some(0.01));
    }
}
