//! Regeneration cycles of `R` and the renewal sequence they generate.
//!
//! One cycle starts `R` at 1, waits for the first hitting time `H` of `r`,
//! and records the global minimum `A` of the path after `H`, its time `T`,
//! and the running maximum `B` on `[H, T]`. The minimum is only final once
//! the path has escaped to infinity, so a simulated cycle is closed when `R`
//! reaches `r^k`; the recorded minimum is wrong with probability exactly
//! `ln A / (k ln r)`, which each record carries as `err_bound`.
//!
//! Rescaled cycles are i.i.d., which gives `T_n = Σ (A'_1…A'_{i-1})² T'_i`
//! and `A_n = A'_1…A'_n`; [`assemble_renewal`] evaluates this in the log
//! domain for any `n`.

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::laws::{open_unit, CycleLawParams};
use crate::numerics::ln_add_exp;
use crate::rng::{splitmix64, task_rng};
use crate::sde::{HybridIntegrator, HybridStep};
use crate::{Error, IntegratorConfig, Result};

/// `2(x0 - m)(x1 - m)/du` above which a bridge dip below `m` is ignored
/// (probability below `e^{-40}`).
const BRIDGE_CUTOFF: f64 = 40.0;

/// The observables of one simulated cycle, started at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CycleRecord {
    /// First hitting time of `r`.
    pub h: f64,
    /// Time of the recorded future minimum.
    pub t: f64,
    /// The recorded future minimum, in `(1, r)`.
    pub a: f64,
    /// Maximum of the path on `[H, T]`.
    pub b: f64,
    /// `ln A / ln r`.
    pub u: f64,
    /// `ln B / ln r`.
    pub v: f64,
    /// The cycle closed when `R` reached `r^k`.
    pub k: u32,
    /// Probability that the path dips below `A` after closing: `U/k`.
    pub err_bound: f64,
    /// No dip below `r` was observed after `H` (an artifact of the
    /// discretization; `T = H`, `A = r`).
    pub degenerate: bool,
}

impl CycleRecord {
    /// Rebuilds a record from `(H, T, A, B, k)`; `U`, `V` and `err_bound`
    /// are recomputed so that `A = r^U` and `B = r^V` hold exactly.
    pub fn from_parts(params: &CycleLawParams, h: f64, t: f64, a: f64, b: f64, k: u32) -> Result<Self> {
        let r = params.r();
        if !(h > 0.0 && h <= t && t.is_finite()) {
            return Err(Error::InvalidInput("cycle times must satisfy 0 < H <= T"));
        }
        if !(a > 1.0 && a <= r && b >= r && b.is_finite()) {
            return Err(Error::InvalidInput("cycle levels must satisfy 1 < A <= r <= B"));
        }
        if k < 2 {
            return Err(Error::InvalidInput("truncation exponent must be at least 2"));
        }
        let ln_r = params.ln_r();
        let u = a.ln() / ln_r;
        Ok(Self {
            h,
            t,
            a,
            b,
            u,
            v: b.ln() / ln_r,
            k,
            err_bound: u / k as f64,
            degenerate: a == r,
        })
    }
}

/// Samples whether the Brownian bridge from `x0` to `x1` over variance `du`
/// dips below `m`, and if so returns its minimum.
fn bridge_dip<G: Rng + ?Sized>(x0: f64, x1: f64, du: f64, m: f64, rng: &mut G) -> Option<f64> {
    let (a, b) = (x0 - m, x1 - m);
    if a <= 0.0 || b <= 0.0 {
        // The grid itself reaches the level; the dip is certain.
        let v = open_unit(rng);
        return Some(bridge_min(x0, x1, du, v));
    }
    let expo = 2.0 * a * b / du;
    if expo > BRIDGE_CUTOFF {
        return None;
    }
    let v = open_unit(rng);
    if v.ln() < -expo {
        Some(bridge_min(x0, x1, du, v))
    } else {
        None
    }
}

/// The Brownian bridge from `x0` to `x1` over variance `du`, if it rises
/// above `level`: its maximum.
fn bridge_peak<G: Rng + ?Sized>(x0: f64, x1: f64, du: f64, level: f64, rng: &mut G) -> Option<f64> {
    bridge_dip(-x0, -x1, du, -level, rng).map(|m| -m)
}

/// Minimum of the Brownian bridge from `x0` to `x1` over variance `du`, by
/// inversion at `v ∈ (0, 1)`.
fn bridge_min(x0: f64, x1: f64, du: f64, v: f64) -> f64 {
    let d = x1 - x0;
    0.5 * (x0 + x1 - (d * d - 2.0 * du * v.ln()).sqrt())
}

/// Simulates one cycle with the hybrid integrator.
///
/// Before `H` the path is resolved relative to the unit circle and to `r`,
/// so that `H` is located to within a tiny step; afterwards relative to the
/// current record `m`, so the geometric clock only runs where a new record
/// is out of reach of a single step. New records inside
/// a step are detected by sampling the Brownian-bridge minimum; `T` is the
/// left endpoint of the step that produced the record.
pub fn simulate_cycle<G: Rng + ?Sized>(
    params: &CycleLawParams,
    k: u32,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<CycleRecord> {
    let ln_r = params.ln_r();
    if k < 2 {
        return Err(Error::InvalidInput("truncation exponent must be at least 2"));
    }
    if k as f64 * ln_r > 700.0 {
        return Err(Error::InvalidInput("r^k overflows"));
    }
    let r = params.r();
    let top = (k as f64 * ln_r).exp();
    let guard_level = 1.0 + cfg.boundary_guard;
    let mut eng = HybridIntegrator::new(1.0, cfg)?;
    eng.set_ceiling(r);

    let first: HybridStep = loop {
        let step = eng.step(rng, f64::INFINITY)?;
        if step.r1 >= r {
            break step;
        }
    };
    let h = first.crossing_time(r).max(first.u0).max(f64::MIN_POSITIVE);
    let (mut m, mut t, mut b) = (r, h, r);
    let mut degenerate = true;
    // Remainder of the crossing step, from (H, r).
    let rest = first.u1 - h;
    if rest > 0.0 {
        if let Some(dip) = bridge_dip(r, first.r1, rest, m, rng) {
            m = dip.max(guard_level);
            degenerate = false;
        }
    }
    let mut run_max = r.max(first.r1);
    if rest > 0.0 {
        if let Some(peak) = bridge_peak(r, first.r1, rest, run_max, rng) {
            run_max = peak;
        }
    }
    eng.set_ceiling(f64::INFINITY);
    eng.set_floor(m);

    let mut last = first.r1;
    while last < top {
        let step = eng.step(rng, f64::INFINITY)?;
        if let Some(dip) = bridge_dip(step.r0, step.r1, step.variance(), m, rng) {
            m = dip.max(guard_level);
            t = step.u0;
            b = run_max;
            degenerate = false;
            eng.set_floor(m);
        }
        run_max = run_max.max(step.r1);
        if let Some(peak) = bridge_peak(step.r0, step.r1, step.variance(), run_max, rng) {
            run_max = peak;
        }
        last = step.r1;
    }
    finish(params, k, h, t, m, b, degenerate)
}

fn finish(params: &CycleLawParams, k: u32, h: f64, t: f64, m: f64, b: f64, degenerate: bool) -> Result<CycleRecord> {
    let ln_r = params.ln_r();
    let r = params.r();
    let a = m.min(r);
    let u = a.ln() / ln_r;
    Ok(CycleRecord {
        h,
        t,
        a,
        b,
        u,
        v: b.ln() / ln_r,
        k,
        err_bound: u / k as f64,
        degenerate,
    })
}

/// `simulate_cycle` on the stream of task `index` under `cfg.seed`.
pub fn simulate_cycle_indexed(params: &CycleLawParams, k: u32, cfg: &IntegratorConfig, index: u64) -> Result<CycleRecord> {
    simulate_cycle(params, k, cfg, &mut task_rng(cfg.seed, index))
}

/// Stable digest of the numerical settings a pool was produced with.
pub fn cfg_fingerprint(cfg: &IntegratorConfig) -> u64 {
    let words = [
        cfg.dt_natural.to_bits(),
        cfg.dt_geometric.to_bits(),
        cfg.boundary_guard.to_bits(),
        cfg.max_halvings as u64,
        cfg.seed,
        cfg.refine.to_bits(),
        cfg.switch_margin.to_bits(),
        cfg.max_switches as u64,
    ];
    words.iter().fold(0x6a09_e667_f3bc_c908, |h, &w| splitmix64(h ^ w))
}

/// Independent cycles sharing `r` and `k`: the empirical cycle law.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CyclePool {
    records: Vec<CycleRecord>,
    params: CycleLawParams,
    k: u32,
    cfg_fingerprint: u64,
}

impl CyclePool {
    pub fn new(records: Vec<CycleRecord>, params: CycleLawParams, k: u32, cfg_fingerprint: u64) -> Result<Self> {
        if records.iter().any(|c| c.k != k) {
            return Err(Error::InvalidInput("all records of a pool must share k"));
        }
        let r = params.r();
        if records.iter().any(|c| !(c.a > 1.0 && c.a <= r && c.b >= r)) {
            return Err(Error::InvalidInput("record levels inconsistent with r"));
        }
        Ok(Self { records, params, k, cfg_fingerprint })
    }

    pub fn records(&self) -> &[CycleRecord] {
        &self.records
    }

    pub fn params(&self) -> &CycleLawParams {
        &self.params
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cfg_fingerprint(&self) -> u64 {
        self.cfg_fingerprint
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The first `n` records as a pool of their own.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            records: self.records[..n.min(self.len())].to_vec(),
            params: self.params,
            k: self.k,
            cfg_fingerprint: self.cfg_fingerprint,
        }
    }
}

/// Sequential pool of `n` cycles; record `i` uses task stream `i`.
pub fn simulate_pool(params: &CycleLawParams, k: u32, n: usize, cfg: &IntegratorConfig) -> Result<CyclePool> {
    let records = (0..n as u64)
        .map(|i| simulate_cycle_indexed(params, k, cfg, i))
        .collect::<Result<Vec<_>>>()?;
    CyclePool::new(records, *params, k, cfg_fingerprint(cfg))
}

/// One rescaled cycle as consumed by the renewal assembler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleDraw {
    /// `ln A' / ln r`.
    pub u: f64,
    /// `ln T'`.
    pub ln_tp: f64,
}

impl From<&CycleRecord> for CycleDraw {
    fn from(c: &CycleRecord) -> Self {
        Self { u: c.u, ln_tp: c.t.ln() }
    }
}

/// A supply of i.i.d. cycles.
pub trait CycleSource {
    fn ln_r(&self) -> f64;
    fn draw<G: Rng + ?Sized>(&mut self, rng: &mut G) -> Result<CycleDraw>;
}

/// Draws pool records uniformly with replacement.
#[derive(Debug, Clone)]
pub struct Bootstrap<'p> {
    pool: &'p CyclePool,
}

impl<'p> Bootstrap<'p> {
    pub fn new(pool: &'p CyclePool) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::EmptySource);
        }
        Ok(Self { pool })
    }
}

impl CycleSource for Bootstrap<'_> {
    fn ln_r(&self) -> f64 {
        self.pool.params().ln_r()
    }

    fn draw<G: Rng + ?Sized>(&mut self, rng: &mut G) -> Result<CycleDraw> {
        let i = rng.random_range(0..self.pool.len());
        Ok(CycleDraw::from(&self.pool.records()[i]))
    }
}

/// Reads pool records in order, each once.
#[derive(Debug, Clone)]
pub struct InOrder<'p> {
    pool: &'p CyclePool,
    next: usize,
}

impl<'p> InOrder<'p> {
    pub fn new(pool: &'p CyclePool) -> Self {
        Self { pool, next: 0 }
    }
}

impl CycleSource for InOrder<'_> {
    fn ln_r(&self) -> f64 {
        self.pool.params().ln_r()
    }

    fn draw<G: Rng + ?Sized>(&mut self, _rng: &mut G) -> Result<CycleDraw> {
        let c = self.pool.records().get(self.next).ok_or(Error::EmptySource)?;
        self.next += 1;
        Ok(CycleDraw::from(c))
    }
}

/// Simulates a fresh cycle for every draw.
#[derive(Debug, Clone)]
pub struct LiveSampler<'c> {
    params: CycleLawParams,
    k: u32,
    cfg: &'c IntegratorConfig,
}

impl<'c> LiveSampler<'c> {
    pub fn new(params: CycleLawParams, k: u32, cfg: &'c IntegratorConfig) -> Self {
        Self { params, k, cfg }
    }
}

impl CycleSource for LiveSampler<'_> {
    fn ln_r(&self) -> f64 {
        self.params.ln_r()
    }

    fn draw<G: Rng + ?Sized>(&mut self, rng: &mut G) -> Result<CycleDraw> {
        simulate_cycle(&self.params, self.k, self.cfg, rng).map(|c| CycleDraw::from(&c))
    }
}

/// Cycles produced by a closure of the draw index.
#[derive(Debug, Clone)]
pub struct FromFn<F> {
    ln_r: f64,
    next: usize,
    f: F,
}

impl<F: FnMut(usize) -> CycleDraw> FromFn<F> {
    pub fn new(params: &CycleLawParams, f: F) -> Self {
        Self { ln_r: params.ln_r(), next: 0, f }
    }
}

impl<F: FnMut(usize) -> CycleDraw> CycleSource for FromFn<F> {
    fn ln_r(&self) -> f64 {
        self.ln_r
    }

    fn draw<G: Rng + ?Sized>(&mut self, _rng: &mut G) -> Result<CycleDraw> {
        let d = (self.f)(self.next);
        self.next += 1;
        Ok(d)
    }
}

/// `(T_i, A_i)` for `i = 1..=n`, kept in logarithms.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RenewalSequence {
    pub ln_r: f64,
    pub u: Vec<f64>,
    pub ln_tp: Vec<f64>,
    pub ln_a: Vec<f64>,
    pub ln_t: Vec<f64>,
    /// `ln S_i = ln T_i - 2 ln A_i`.
    pub ln_s: Vec<f64>,
}

impl RenewalSequence {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Assembles `n` cycles from `source`.
///
/// The sum is carried through `S_i = T_i / A_i²`, which obeys
/// `S_i = r^{-2U_i} (S_{i-1} + T'_i)`: with `w = ln(S_{i-1} + T'_i)`,
/// `ln S_i = w - 2 U_i ln r` and `ln T_i = 2 ln A_{i-1} + w`. This is the
/// log-sum-exp form of `T_i = T_{i-1} + A_{i-1}² T'_i` and never leaves the
/// log domain. `ln S` is kept separately because `ln T - 2 ln A` loses
/// digits to cancellation once `ln T` is in the hundreds of thousands.
pub fn assemble_renewal<S: CycleSource, G: Rng + ?Sized>(
    source: &mut S,
    n: usize,
    rng: &mut G,
) -> Result<RenewalSequence> {
    if n == 0 {
        return Err(Error::InvalidInput("renewal length must be at least 1"));
    }
    let ln_r = source.ln_r();
    let mut seq = RenewalSequence {
        ln_r,
        u: Vec::with_capacity(n),
        ln_tp: Vec::with_capacity(n),
        ln_a: Vec::with_capacity(n),
        ln_t: Vec::with_capacity(n),
        ln_s: Vec::with_capacity(n),
    };
    let (mut ln_a, mut ln_s, mut ln_t) = (0.0, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for _ in 0..n {
        let d = source.draw(rng)?;
        let w = ln_add_exp(ln_s, d.ln_tp);
        // Mathematically 2 ln A_{i-1} + w >= ln T_{i-1}; the max only absorbs
        // rounding once ln T is large.
        ln_t = (2.0 * ln_a + w).max(ln_t);
        ln_a += d.u * ln_r;
        ln_s = w - 2.0 * d.u * ln_r;
        seq.u.push(d.u);
        seq.ln_tp.push(d.ln_tp);
        seq.ln_a.push(ln_a);
        seq.ln_t.push(ln_t);
        seq.ln_s.push(ln_s);
    }
    Ok(seq)
}

/// `S_i = T_i / A_i²`.
pub fn s_sequence(seq: &RenewalSequence) -> Vec<f64> {
    seq.ln_s.iter().map(|x| x.exp()).collect()
}

/// Largest relative residual of `S_i = α_i S_{i-1} + β_i`, with
/// `α_i = r^{-2U_i}`, `β_i = T'_i r^{-2U_i}`, in linear arithmetic
/// (log-domain where that under- or overflows).
pub fn recursion_residual(seq: &RenewalSequence) -> f64 {
    let mut worst = 0.0f64;
    let mut prev_ln_s = f64::NEG_INFINITY;
    for i in 0..seq.len() {
        let ln_s = seq.ln_s[i];
        let ln_alpha = -2.0 * seq.u[i] * seq.ln_r;
        let (s, sp, alpha, beta) = (ln_s.exp(), prev_ln_s.exp(), ln_alpha.exp(), (seq.ln_tp[i] + ln_alpha).exp());
        let linear_ok = [s, alpha, beta].iter().all(|x| x.is_normal()) && sp.is_finite();
        let res = if linear_ok {
            (s - (alpha * sp + beta)).abs() / s
        } else {
            (ln_s - (ln_alpha + ln_add_exp(prev_ln_s, seq.ln_tp[i]))).exp_m1().abs()
        };
        worst = worst.max(res);
        prev_ln_s = ln_s;
    }
    worst
}

/// An envelope `t ↦ f(t)` evaluated in logarithms: `ln f` as a function of
/// `ln t`. `None` marks points outside the envelope's domain.
pub trait LogEnvelope {
    fn ln_value(&self, ln_t: f64) -> Option<f64>;
}

impl<F: Fn(f64) -> Option<f64>> LogEnvelope for F {
    fn ln_value(&self, ln_t: f64) -> Option<f64> {
        self(ln_t)
    }
}

/// `f(t) = √t`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SqrtEnvelope;

impl LogEnvelope for SqrtEnvelope {
    fn ln_value(&self, ln_t: f64) -> Option<f64> {
        Some(0.5 * ln_t)
    }
}

/// `f(t) = exp(ln t · g(ln₂ t))`, defined for `t > e`.
#[derive(Debug, Clone, Copy)]
pub struct IntegralTestEnvelope<G> {
    pub g: G,
}

impl<G: Fn(f64) -> f64> LogEnvelope for IntegralTestEnvelope<G> {
    fn ln_value(&self, ln_t: f64) -> Option<f64> {
        (ln_t > 1.0).then(|| ln_t * (self.g)(ln_t.ln()))
    }
}

/// `f(t) = K √(t ln₃ t)`, defined where `ln₃ t > 0`.
#[derive(Debug, Clone, Copy)]
pub struct EscapeEnvelope {
    pub k: f64,
}

impl LogEnvelope for EscapeEnvelope {
    fn ln_value(&self, ln_t: f64) -> Option<f64> {
        if ln_t <= 1.0 {
            return None;
        }
        let l2 = ln_t.ln();
        if l2 <= 1.0 {
            return None;
        }
        Some(self.k.ln() + 0.5 * (ln_t + l2.ln().ln()))
    }
}

/// Which side of the envelope counts as a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Crossing {
    /// `A_i < f(T_i)`.
    Below,
    /// `A_i > f(T_i)`.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvelopeReport {
    pub direction: Crossing,
    /// Indices (0-based) where the crossing occurs.
    pub indices: Vec<usize>,
    /// `ln A_i - ln f(T_i)` for every evaluated index of the range; `NaN`
    /// where the envelope is undefined.
    pub margins: Vec<f64>,
    /// Points outside the envelope's domain.
    pub skipped: usize,
}

impl EnvelopeReport {
    pub fn count(&self) -> usize {
        self.indices.len()
    }
}

/// Compares the future minima `A_i = M(T_i)` with `f(T_i)` on `range`.
pub fn future_min_envelope<E: LogEnvelope + ?Sized>(
    seq: &RenewalSequence,
    range: Range<usize>,
    envelope: &E,
    direction: Crossing,
) -> Result<EnvelopeReport> {
    let range = range.start.min(seq.len())..range.end.min(seq.len());
    let mut report = EnvelopeReport { direction, indices: Vec::new(), margins: Vec::with_capacity(range.len()), skipped: 0 };
    for i in range {
        match envelope.ln_value(seq.ln_t[i]) {
            None => {
                report.skipped += 1;
                report.margins.push(f64::NAN);
            }
            Some(lf) if lf.is_nan() => return Err(Error::Envelope(i)),
            Some(lf) => {
                let margin = seq.ln_a[i] - lf;
                let crossed = match direction {
                    Crossing::Below => margin < 0.0,
                    Crossing::Above => margin > 0.0,
                };
                if crossed {
                    report.indices.push(i);
                }
                report.margins.push(margin);
            }
        }
    }
    Ok(report)
}

/// Relative resolution of the leaves of a [`BridgeTree`]: a leaf's standard
/// deviation is at most this fraction of its distance to the unit circle
/// (or of 10⁻³, whichever is larger).
const LEAF_RESOLUTION: f64 = 1e-4;

#[derive(Clone, Copy)]
struct BridgeNode {
    u0: f64,
    r0: f64,
    u1: f64,
    r1: f64,
    kids: Option<(usize, usize)>,
    min: Option<f64>,
}

/// A path known on a grid, refined on demand by Brownian-bridge bisection.
/// Crossings and minima are only decided on leaves small enough that the
/// remaining error is negligible, and every sampled value is kept, so all
/// queries see one and the same path.
struct BridgeTree {
    nodes: Vec<BridgeNode>,
    roots: Vec<usize>,
    floor: f64,
}

impl BridgeTree {
    fn new(steps: &[HybridStep], floor: f64) -> Self {
        let nodes: Vec<BridgeNode> = steps
            .iter()
            .map(|s| BridgeNode { u0: s.u0, r0: s.r0, u1: s.u1, r1: s.r1, kids: None, min: None })
            .collect();
        let roots = (0..nodes.len()).collect();
        BridgeTree { nodes, roots, floor }
    }

    fn is_leaf(&self, i: usize) -> bool {
        let n = &self.nodes[i];
        // Midpoints clamped at the floor would otherwise refine forever, and
        // late in a long path the clock itself runs out of digits.
        let scale = (n.r0.min(n.r1) - 1.0).max(1e-3) * LEAF_RESOLUTION;
        n.u1 - n.u0 <= (scale * scale).max(1e-12 * n.u1)
    }

    fn split<G: Rng + ?Sized>(&mut self, i: usize, rng: &mut G) -> (usize, usize) {
        if let Some(k) = self.nodes[i].kids {
            return k;
        }
        let n = self.nodes[i];
        let um = 0.5 * (n.u0 + n.u1);
        let rm = (0.5 * (n.r0 + n.r1) + 0.5 * (n.u1 - n.u0).sqrt() * rng.sample::<f64, _>(StandardNormal)).max(self.floor);
        let l = self.nodes.len();
        self.nodes.push(BridgeNode { u1: um, r1: rm, kids: None, min: None, ..n });
        self.nodes.push(BridgeNode { u0: um, r0: rm, kids: None, min: None, ..n });
        self.nodes[i].kids = Some((l, l + 1));
        (l, l + 1)
    }

    fn leaf_min<G: Rng + ?Sized>(&mut self, i: usize, rng: &mut G) -> f64 {
        let n = self.nodes[i];
        if let Some(m) = n.min {
            return m;
        }
        let m = bridge_min(n.r0, n.r1, n.u1 - n.u0, open_unit(rng)).max(self.floor);
        self.nodes[i].min = Some(m);
        m
    }

    /// First leaf after time `from` on which the path reaches `level`.
    fn first_passage<G: Rng + ?Sized>(&mut self, level: f64, from: f64, rng: &mut G) -> Option<usize> {
        for j in 0..self.roots.len() {
            let root = self.roots[j];
            if self.nodes[root].u1 <= from {
                continue;
            }
            if let Some(hit) = self.passage_in(root, level, from, rng) {
                return Some(hit);
            }
        }
        None
    }

    fn passage_in<G: Rng + ?Sized>(&mut self, i: usize, level: f64, from: f64, rng: &mut G) -> Option<usize> {
        let n = self.nodes[i];
        if n.u1 <= from {
            return None;
        }
        let inside = n.u0 >= from;
        if inside {
            let expo = if n.r0.max(n.r1) >= level { 0.0 } else { 2.0 * (level - n.r0) * (level - n.r1) / (n.u1 - n.u0) };
            if expo > BRIDGE_CUTOFF {
                return None;
            }
            if self.is_leaf(i) {
                return (expo == 0.0 || open_unit(rng).ln() < -expo).then_some(i);
            }
        }
        let (a, b) = self.split(i, rng);
        self.passage_in(a, level, from, rng).or_else(|| self.passage_in(b, level, from, rng))
    }

    /// Minimum of the path on `[from, until]`, with the start of the leaf
    /// attaining it. Both ends must be leaf boundaries.
    fn window_min<G: Rng + ?Sized>(&mut self, from: f64, until: f64, rng: &mut G) -> (f64, f64) {
        // Any grid value in the window bounds the minimum from above.
        let mut best = (f64::INFINITY, from);
        for &root in &self.roots {
            let n = self.nodes[root];
            if n.u1 > from && n.u1 <= until && n.r1 < best.0 {
                best = (n.r1, n.u1);
            }
        }
        for j in 0..self.roots.len() {
            let root = self.roots[j];
            self.min_in(root, (from, until), &mut best, rng);
        }
        best
    }

    fn min_in<G: Rng + ?Sized>(&mut self, i: usize, window: (f64, f64), best: &mut (f64, f64), rng: &mut G) {
        let n = self.nodes[i];
        if n.u1 <= window.0 || n.u0 >= window.1 {
            return;
        }
        if n.u0 >= window.0 && n.u1 <= window.1 {
            let (a, b) = (n.r0 - best.0, n.r1 - best.0);
            if a > 0.0 && b > 0.0 && 2.0 * a * b / (n.u1 - n.u0) > BRIDGE_CUTOFF {
                return;
            }
            if self.is_leaf(i) {
                let m = self.leaf_min(i, rng);
                if m < best.0 {
                    *best = (m, n.u0);
                }
                return;
            }
        }
        let (a, b) = self.split(i, rng);
        self.min_in(a, window, best, rng);
        self.min_in(b, window, best, rng);
    }
}

/// Renewal pairs `(ln T_i, ln A_i)`, `i = 1..=n`, read off a single
/// simulated path instead of assembled from independent cycles.
///
/// Each future minimum is truncated like a cycle: the minimum after `H_i` is
/// taken up to the first passage of `r^k A_{i-1}` (with `A_0 = 1`), the
/// level at which the `i`-th assembled cycle stops. Hitting times and minima
/// are located on a lazily bisected Brownian-bridge refinement of the grid,
/// so a level crossed and recrossed within one step is not missed.
pub fn direct_renewal<G: Rng + ?Sized>(
    params: &CycleLawParams,
    n: usize,
    k: u32,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<Vec<(f64, f64)>> {
    let ln_r = params.ln_r();
    let top_ln = (n as f64 + k as f64) * ln_r;
    if n == 0 || k < 2 || top_ln > 700.0 {
        return Err(Error::InvalidInput("direct renewal needs n >= 1, k >= 2 and r^(n+k) finite"));
    }
    let top = top_ln.exp();
    let mut eng = HybridIntegrator::new(1.0, cfg)?;
    let mut steps: Vec<HybridStep> = Vec::new();
    while eng.value() < top {
        steps.push(eng.step(rng, f64::INFINITY)?);
    }
    let mut tree = BridgeTree::new(&steps, 1.0 + cfg.boundary_guard);
    let mut out = Vec::with_capacity(n);
    let ended = Error::InvalidInput("path ended before the next hitting level");
    let r_k = (k as f64 * ln_r).exp();
    let (mut prev, mut from) = (1.0, 0.0);
    for _ in 0..n {
        let hit = tree.first_passage(params.r() * prev, from, rng).ok_or(ended.clone())?;
        let after = tree.nodes[hit].u1;
        let stop = tree.first_passage(r_k * prev, after, rng).ok_or(ended.clone())?;
        let (mut a, mut at) = tree.window_min(after, tree.nodes[stop].u0.max(after), rng);
        if !a.is_finite() {
            // Both passages fell into one leaf.
            (a, at) = (tree.nodes[hit].r1.min(params.r() * prev), after);
        }
        out.push((at.ln(), a.ln()));
        prev = a;
        from = at;
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
