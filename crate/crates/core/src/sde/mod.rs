//! Euler–Maruyama integration of the radial process `R`, of its geometric
//! clock transform `X`, and of Bessel processes.
//!
//! All schemes are explicit Euler with unit diffusion coefficient. A
//! proposal that lands on or below the process boundary (`1 + guard` for
//! `R`, `guard` for Bessel) is rejected and retried with half the step and a
//! fresh Gaussian increment; reflecting instead would distort the law of the
//! path near its records.

mod geometric;
mod hybrid;

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub use geometric::{drift_x, integrate_x, to_geometric, to_natural};
pub use hybrid::{hybrid_endpoint, hybrid_path, Clock, HybridIntegrator, HybridStep, CEILING_MIN_STEP};

/// Which process a [`TrajectoryGrid`] samples.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PathKind {
    /// The conditioned radial process, natural time.
    R,
    /// `X(s) = e^{-s/2} R(e^s - 1)`, geometric time.
    X,
    /// Bessel process of the given dimension, natural time.
    Bessel(f64),
}

/// Step sizes actually used along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// A discretized sample path: strictly increasing times and the process
/// values on them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryGrid {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: PathKind,
    step_stats: Option<StepStats>,
}

impl TrajectoryGrid {
    /// Validates and wraps a path.
    ///
    /// Radial paths may start on the unit circle but must stay strictly
    /// outside it afterwards; `X` paths are positive; Bessel paths are
    /// non-negative.
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: PathKind) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidInput("times and values must be nonempty and of equal length"));
        }
        if times.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("path contains non-finite entries"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("times must be strictly increasing"));
        }
        let values_ok = match kind {
            PathKind::R => values[0] >= 1.0 && values[1..].iter().all(|&v| v > 1.0),
            PathKind::X => values.iter().all(|&v| v > 0.0),
            PathKind::Bessel(_) => values.iter().all(|&v| v >= 0.0),
        };
        if !values_ok {
            return Err(Error::InvalidInput("path values violate the state space of its kind"));
        }
        let step_stats = step_stats(&times);
        Ok(Self { times, values, kind, step_stats })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    /// `None` for single-point paths.
    pub fn step_stats(&self) -> Option<StepStats> {
        self.step_stats
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> (f64, f64) {
        (self.times[0], self.values[0])
    }

    pub fn end(&self) -> (f64, f64) {
        let i = self.times.len() - 1;
        (self.times[i], self.values[i])
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>, PathKind) {
        (self.times, self.values, self.kind)
    }
}

fn step_stats(times: &[f64]) -> Option<StepStats> {
    if times.len() < 2 {
        return None;
    }
    let mut min = f64::INFINITY;
    let mut max = 0.0_f64;
    for w in times.windows(2) {
        let h = w[1] - w[0];
        min = min.min(h);
        max = max.max(h);
    }
    let mean = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    Some(StepStats { min, max, mean })
}

/// Numerical knobs shared by every integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegratorConfig {
    /// Base step in natural time.
    pub dt_natural: f64,
    /// Base step in geometric time.
    pub dt_geometric: f64,
    /// Minimal admissible distance above the boundary (1 for `R`, 0 for
    /// Bessel processes) before a proposal is rejected.
    pub boundary_guard: f64,
    /// Cap on successive halvings of one step.
    pub max_halvings: u32,
    pub seed: u64,
    /// Relative resolution of the hybrid integrator: near the unit circle a
    /// natural step never exceeds `(refine · (R - 1))²`, and the geometric
    /// clock is used only while `refine · (R - floor)` dominates the
    /// natural-time standard deviation of one geometric step.
    pub refine: f64,
    /// Hysteresis between the two clocks of the hybrid integrator.
    pub switch_margin: f64,
    /// Cap on clock switches within one hybrid run.
    pub max_switches: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt_natural: 1e-3,
            dt_geometric: 1e-3,
            boundary_guard: 1e-6,
            max_halvings: 40,
            seed: 2021,
            refine: 0.1,
            switch_margin: 0.05,
            max_switches: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.dt_natural) || !positive(self.dt_geometric) {
            return Err(Error::InvalidInput("integration steps must be positive"));
        }
        if !positive(self.boundary_guard) {
            return Err(Error::InvalidInput("boundary_guard must be positive"));
        }
        if self.max_halvings < 1 {
            return Err(Error::InvalidInput("max_halvings must be at least 1"));
        }
        if !positive(self.refine) || self.refine > 1.0 {
            return Err(Error::InvalidInput("refine must lie in (0, 1]"));
        }
        if !(self.switch_margin >= 0.0 && self.switch_margin.is_finite()) {
            return Err(Error::InvalidInput("switch_margin must be non-negative"));
        }
        if self.max_switches < 1 {
            return Err(Error::InvalidInput("max_switches must be at least 1"));
        }
        Ok(())
    }
}

/// Natural-time drift of `R`: `1/(r ln r) + 1/(2r)`.
#[inline]
pub fn drift_r(r: f64) -> f64 {
    1.0 / (r * r.ln()) + 0.5 / r
}

/// Drift of the `d`-dimensional Bessel process: `(d - 1)/(2x)`.
#[inline]
pub fn drift_bessel(d: f64, x: f64) -> f64 {
    0.5 * (d - 1.0) / x
}

#[derive(Debug)]
pub(crate) enum StepFailure {
    Exhausted,
    NonFinite,
}

impl StepFailure {
    pub(crate) fn at(self, time: f64) -> Error {
        match self {
            StepFailure::Exhausted => Error::StepHalvingExhausted { time },
            StepFailure::NonFinite => Error::NonFinite { time },
        }
    }
}

/// One Euler proposal `x + b dt + √dt Z` with reject-and-halve.
/// Returns the step actually taken and the new value.
#[inline]
pub(crate) fn guarded_euler<G, A>(
    x: f64,
    drift: f64,
    dt: f64,
    max_halvings: u32,
    rng: &mut G,
    admissible: A,
) -> core::result::Result<(f64, f64), StepFailure>
where
    G: Rng + ?Sized,
    A: Fn(f64, f64) -> bool,
{
    let mut dt = dt;
    for _ in 0..=max_halvings {
        let z: f64 = rng.sample(StandardNormal);
        let y = x + drift * dt + dt.sqrt() * z;
        if !y.is_finite() {
            return Err(StepFailure::NonFinite);
        }
        if admissible(dt, y) {
            return Ok((dt, y));
        }
        dt *= 0.5;
    }
    Err(StepFailure::Exhausted)
}

#[derive(Debug, Clone, Copy)]
enum Scalar {
    Radial,
    Bessel(f64),
}

/// Natural-time walker shared by the path and endpoint APIs: base step
/// `dt_natural`, shortened to `(refine · distance to the boundary)²` where
/// the singular drift would otherwise throw the path far out in one step.
#[derive(Debug, Clone)]
pub(crate) struct NaturalWalker {
    process: Scalar,
    pub(crate) t: f64,
    pub(crate) x: f64,
    dt: f64,
    refine: f64,
    guard: f64,
    max_halvings: u32,
}

impl NaturalWalker {
    /// Radial walker from `r0 >= 1`; `r0 = 1` is displaced to `1 + guard`.
    pub(crate) fn radial(r0: f64, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if !(r0.is_finite() && r0 >= 1.0) {
            return Err(Error::InvalidInput("r0 must be at least 1"));
        }
        let guard = cfg.boundary_guard;
        Ok(Self {
            process: Scalar::Radial,
            t: 0.0,
            x: r0.max(1.0 + guard),
            dt: cfg.dt_natural,
            refine: cfg.refine,
            guard,
            max_halvings: cfg.max_halvings,
        })
    }

    fn bessel(d: f64, x0: f64, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if !(d.is_finite() && d >= 2.0) {
            return Err(Error::InvalidInput("Bessel dimension must be at least 2"));
        }
        if !(x0.is_finite() && x0 >= 0.0) {
            return Err(Error::InvalidInput("Bessel start must be non-negative"));
        }
        let guard = cfg.boundary_guard;
        Ok(Self {
            process: Scalar::Bessel(d),
            t: 0.0,
            x: x0.max(guard),
            dt: cfg.dt_natural,
            refine: cfg.refine,
            guard,
            max_halvings: cfg.max_halvings,
        })
    }

    /// One step towards `t_stop`, landing on it exactly when within reach.
    /// Returns the squared-noise scale (the step length) actually used.
    #[inline]
    pub(crate) fn advance<G: Rng + ?Sized>(&mut self, t_stop: f64, rng: &mut G) -> Result<f64> {
        let boundary = match self.process {
            Scalar::Radial => 1.0,
            Scalar::Bessel(_) => 0.0,
        };
        let near = self.refine * (self.x - boundary);
        let base = self.dt.min(near * near);
        let remaining = t_stop - self.t;
        let lands = remaining <= base;
        let dt = if lands { remaining } else { base };
        let floor = boundary + self.guard;
        let drift = match self.process {
            Scalar::Radial => drift_r(self.x),
            Scalar::Bessel(d) => drift_bessel(d, self.x),
        };
        let (used, y) = guarded_euler(self.x, drift, dt, self.max_halvings, rng, |_, y| y > floor)
            .map_err(|f| f.at(self.t))?;
        self.t = if lands && used == dt { t_stop } else { self.t + used };
        self.x = y;
        Ok(used)
    }

    fn run_to<G: Rng + ?Sized>(
        &mut self,
        horizon: f64,
        rng: &mut G,
        mut visit: impl FnMut(f64, f64),
    ) -> Result<()> {
        while self.t < horizon {
            self.advance(horizon, rng)?;
            visit(self.t, self.x);
        }
        Ok(())
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput("horizon must be finite and non-negative"))
    }
}

/// Integrates `R` on `[0, horizon]` from `r0` with the base step
/// `cfg.dt_natural` (shortened near the unit circle, see `refine`).
///
/// From `r0 = 1` the singular drift is avoided by one deterministic
/// displacement to `1 + boundary_guard`; the grid still starts at `(0, 1)`.
/// This shifts hitting times by `O(boundary_guard)`.
pub fn integrate_r<G: Rng + ?Sized>(
    r0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<TrajectoryGrid> {
    check_horizon(horizon)?;
    let mut walker = NaturalWalker::radial(r0, cfg)?;
    let mut times = alloc::vec![0.0];
    let mut values = alloc::vec![r0];
    walker.run_to(horizon, rng, |t, x| {
        times.push(t);
        values.push(x);
    })?;
    TrajectoryGrid::new(times, values, PathKind::R)
}

/// `R(horizon)` without storing the path.
pub fn integrate_r_endpoint<G: Rng + ?Sized>(
    r0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<f64> {
    check_horizon(horizon)?;
    let mut walker = NaturalWalker::radial(r0, cfg)?;
    if horizon == 0.0 {
        return Ok(r0);
    }
    walker.run_to(horizon, rng, |_, _| {})?;
    Ok(walker.x)
}

/// Integrates `BES^d`, `d >= 2`, on `[0, horizon]` from `x0 >= 0`.
/// A start at 0 is displaced to `boundary_guard`.
pub fn integrate_bessel<G: Rng + ?Sized>(
    d: f64,
    x0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<TrajectoryGrid> {
    check_horizon(horizon)?;
    let mut walker = NaturalWalker::bessel(d, x0, cfg)?;
    let mut times = alloc::vec![0.0];
    let mut values = alloc::vec![x0];
    walker.run_to(horizon, rng, |t, x| {
        times.push(t);
        values.push(x);
    })?;
    TrajectoryGrid::new(times, values, PathKind::Bessel(d))
}

/// `BES^d(horizon)` without storing the path.
pub fn integrate_bessel_endpoint<G: Rng + ?Sized>(
    d: f64,
    x0: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<f64> {
    check_horizon(horizon)?;
    let mut walker = NaturalWalker::bessel(d, x0, cfg)?;
    if horizon == 0.0 {
        return Ok(x0);
    }
    walker.run_to(horizon, rng, |_, _| {})?;
    Ok(walker.x)
}

/// `BES²`, `R` and `BES^{2+δ}` started at 1 and driven by the same Brownian
/// increments.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTriple {
    pub bes2: TrajectoryGrid,
    pub r: TrajectoryGrid,
    pub bes2d: TrajectoryGrid,
    pub delta: f64,
    /// Last grid time with `R <= e^{2/δ}`; `None` while `R` is still below
    /// that level at the end of the horizon.
    pub switch_time: Option<f64>,
}

impl CoupledTriple {
    fn switch_index(&self) -> Option<usize> {
        let t = self.switch_time?;
        self.r.times().iter().position(|&s| s == t)
    }

    /// Number of grid points where `BES² > R`.
    pub fn domination_violations(&self) -> usize {
        self.bes2
            .values()
            .iter()
            .zip(self.r.values())
            .filter(|(b, r)| b > r)
            .count()
    }

    /// `max_{i > σ} [(R_i - R_σ) - (D_i - D_σ)]` with `D = BES^{2+δ}`;
    /// `None` before the switch time.
    pub fn increment_excess(&self) -> Option<f64> {
        let sw = self.switch_index()?;
        let (r, d) = (self.r.values(), self.bes2d.values());
        Some(
            (sw + 1..r.len())
                .map(|i| (r[i] - r[sw]) - (d[i] - d[sw]))
                .fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Largest one-step increase of `(R - D)^+` strictly after the switch
    /// time. Non-positive when the coupling orders the two paths as the
    /// comparison argument requires.
    pub fn gap_growth_after_switch(&self) -> Option<f64> {
        let sw = self.switch_index()?;
        let (r, d) = (self.r.values(), self.bes2d.values());
        let gap = |i: usize| (r[i] - d[i]).max(0.0);
        Some(
            (sw + 2..r.len())
                .map(|i| gap(i) - gap(i - 1))
                .fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

/// Simulates the shared-noise coupling of `BES²`, `R` and `BES^{2+δ}` on
/// `[0, horizon]`, all started at 1.
///
/// Each step is also limited to `dt <= 2 BES²(t)²` (and the analogous bound
/// for `BES^{2+δ}`), which makes the Euler map `x ↦ x + dt/(2x)` monotone;
/// together with the pointwise drift ordering this gives `BES² <= R` on
/// every grid point as computed.
pub fn coupled_triple<G: Rng + ?Sized>(
    delta: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<CoupledTriple> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidInput("delta must be positive"));
    }
    check_horizon(horizon)?;
    cfg.validate()?;
    let guard = cfg.boundary_guard;
    let level = (2.0 / delta).exp();

    let mut times = alloc::vec![0.0];
    let mut b2v = alloc::vec![1.0];
    let mut rv = alloc::vec![1.0];
    let mut bdv = alloc::vec![1.0];

    let (mut t, mut b2, mut r, mut bd) = (0.0_f64, 1.0_f64, 1.0 + guard, 1.0_f64);
    while t < horizon {
        let remaining = horizon - t;
        let lands = remaining <= cfg.dt_natural;
        let base = if lands { remaining } else { cfg.dt_natural };
        let mut dt = base;
        let mut halvings = 0;
        while dt > 2.0 * b2 * b2 || dt > 2.0 * bd * bd / (1.0 + delta) {
            dt *= 0.5;
            halvings += 1;
            if halvings > cfg.max_halvings {
                return Err(Error::StepHalvingExhausted { time: t });
            }
        }
        let (db2, dr, dbd) = (0.5 / b2, drift_r(r), 0.5 * (1.0 + delta) / bd);
        let accepted = loop {
            let z: f64 = rng.sample(StandardNormal);
            let noise = dt.sqrt() * z;
            let nb2 = b2 + db2 * dt + noise;
            let nr = r + dr * dt + noise;
            let nbd = bd + dbd * dt + noise;
            if !(nb2.is_finite() && nr.is_finite() && nbd.is_finite()) {
                return Err(Error::NonFinite { time: t });
            }
            if nb2 > guard && nbd > guard && nr > 1.0 + guard {
                break (nb2, nr, nbd);
            }
            dt *= 0.5;
            halvings += 1;
            if halvings > cfg.max_halvings {
                return Err(Error::StepHalvingExhausted { time: t });
            }
        };
        t = if lands && dt == base { horizon } else { t + dt };
        (b2, r, bd) = accepted;
        times.push(t);
        b2v.push(b2);
        rv.push(r);
        bdv.push(bd);
    }

    let switch_time = if *rv.last().expect("nonempty") <= level {
        None
    } else {
        rv.iter().rposition(|&x| x <= level).map(|i| times[i])
    };
    Ok(CoupledTriple {
        bes2: TrajectoryGrid::new(times.clone(), b2v, PathKind::Bessel(2.0))?,
        r: TrajectoryGrid::new(times.clone(), rv, PathKind::R)?,
        bes2d: TrajectoryGrid::new(times, bdv, PathKind::Bessel(2.0 + delta))?,
        delta,
        switch_time,
    })
}

/// First time the path reaches `level`, linearly interpolated between the
/// bracketing grid points; `None` if it never does.
pub fn first_hitting(path: &TrajectoryGrid, level: f64) -> Option<f64> {
    let (t, v) = (path.times(), path.values());
    if v[0] == level {
        return Some(t[0]);
    }
    let above = v[0] > level;
    (1..v.len())
        .find(|&i| if above { v[i] <= level } else { v[i] >= level })
        .map(|i| {
            let frac = (level - v[i - 1]) / (v[i] - v[i - 1]);
            t[i - 1] + frac * (t[i] - t[i - 1])
        })
}
