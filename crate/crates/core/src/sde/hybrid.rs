//! Radial integration that alternates between the natural and the geometric
//! clock.
//!
//! Far above a reference `floor` the path is advanced in geometric time with
//! step `dt_geometric`, so that reaching natural time `u` costs `O(ln u)`
//! steps. Whenever `refine · (R - floor)` falls below the natural-time
//! standard deviation `√((1+u) dt_geometric)` of one geometric step, the
//! integrator falls back to natural time, with steps no longer than
//! `(refine · (R - 1))²` near the unit circle. Re-entry into the geometric
//! clock requires the gap to exceed that scale by the factor
//! `1 + switch_margin`.
//!
//! An optional `ceiling` is resolved the same way from below, so that the
//! first passage above it is located to within a step of variance
//! [`CEILING_MIN_STEP`].

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{drift_r, drift_x, guarded_euler, PathKind, TrajectoryGrid};
use crate::{Error, IntegratorConfig, Result};

/// Smallest natural step taken when closing in on the ceiling.
pub const CEILING_MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    Natural,
    Geometric,
}

/// One accepted step, in natural coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridStep {
    pub u0: f64,
    pub r0: f64,
    pub u1: f64,
    pub r1: f64,
    pub clock: Clock,
}

impl HybridStep {
    /// Quadratic variation of the driving noise over the step, in natural
    /// time.
    pub fn variance(&self) -> f64 {
        self.u1 - self.u0
    }

    /// Linear interpolation of the time at which the step reaches `level`.
    pub fn crossing_time(&self, level: f64) -> f64 {
        if self.r1 == self.r0 {
            return self.u0;
        }
        let frac = ((level - self.r0) / (self.r1 - self.r0)).clamp(0.0, 1.0);
        self.u0 + frac * (self.u1 - self.u0)
    }
}

#[derive(Debug, Clone)]
pub struct HybridIntegrator<'c> {
    cfg: &'c IntegratorConfig,
    u: f64,
    r: f64,
    // Geometric state; kept in sync with (u, r) while the geometric clock runs.
    s: f64,
    x: f64,
    scale: f64,
    clock: Clock,
    floor: f64,
    ceiling: f64,
    switches: usize,
    sqrt_dt_geo: f64,
    stop_cache: (f64, f64),
}

impl<'c> HybridIntegrator<'c> {
    /// Starts at natural time 0 from `r0 >= 1`, floor 1. A start on the unit
    /// circle is displaced to `1 + boundary_guard`.
    pub fn new(r0: f64, cfg: &'c IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if !(r0.is_finite() && r0 >= 1.0) {
            return Err(Error::InvalidInput("r0 must be at least 1"));
        }
        Ok(Self {
            cfg,
            u: 0.0,
            r: r0.max(1.0 + cfg.boundary_guard),
            s: 0.0,
            x: r0,
            scale: 1.0,
            clock: Clock::Natural,
            floor: 1.0,
            ceiling: f64::INFINITY,
            switches: 0,
            sqrt_dt_geo: cfg.dt_geometric.sqrt(),
            stop_cache: (f64::INFINITY, f64::INFINITY),
        })
    }

    pub fn time(&self) -> f64 {
        self.u
    }

    pub fn value(&self) -> f64 {
        self.r
    }

    pub fn clock(&self) -> Clock {
        self.clock
    }

    pub fn switches(&self) -> usize {
        self.switches
    }

    /// Level whose neighbourhood must be resolved in natural time.
    pub fn set_floor(&mut self, floor: f64) {
        self.floor = floor.max(1.0);
    }

    /// Level whose first passage from below must be resolved; `∞` for none.
    pub fn set_ceiling(&mut self, ceiling: f64) {
        self.ceiling = ceiling;
    }

    fn choose_clock(&mut self) -> Result<()> {
        let below = if self.r < self.ceiling { self.ceiling - self.r } else { f64::INFINITY };
        let gap = self.cfg.refine * (self.r - self.floor).min(below);
        match self.clock {
            Clock::Natural => {
                let threshold = (1.0 + self.cfg.switch_margin) * self.sqrt_dt_geo;
                let one_plus_u = 1.0 + self.u;
                if gap > 0.0 && gap * gap >= threshold * threshold * one_plus_u {
                    self.s = self.u.ln_1p();
                    self.scale = one_plus_u.sqrt();
                    self.x = self.r / self.scale;
                    self.clock = Clock::Geometric;
                    self.switches += 1;
                }
            }
            Clock::Geometric => {
                if gap < self.scale * self.sqrt_dt_geo {
                    self.clock = Clock::Natural;
                    self.switches += 1;
                }
            }
        }
        if self.switches > self.cfg.max_switches {
            return Err(Error::PhaseThrash(self.switches));
        }
        Ok(())
    }

    fn stop_in_geometric_time(&mut self, u_stop: f64) -> f64 {
        if self.stop_cache.0 != u_stop {
            self.stop_cache = (u_stop, u_stop.ln_1p());
        }
        self.stop_cache.1
    }

    /// Advances one step without passing natural time `u_stop`; lands on it
    /// exactly when within reach.
    pub fn step<G: Rng + ?Sized>(&mut self, rng: &mut G, u_stop: f64) -> Result<HybridStep> {
        if !(u_stop > self.u) {
            return Err(Error::InvalidInput("stop time must lie after the current time"));
        }
        self.choose_clock()?;
        let (u0, r0) = (self.u, self.r);
        if self.clock == Clock::Geometric {
            let s_stop = self.stop_in_geometric_time(u_stop);
            if s_stop > self.s {
                self.geometric_step(rng, u_stop, s_stop)?;
                return Ok(HybridStep { u0, r0, u1: self.u, r1: self.r, clock: Clock::Geometric });
            }
            // u_stop is within rounding of the current time in the geometric
            // clock; finish in natural time.
            self.clock = Clock::Natural;
        }
        self.natural_step(rng, u_stop)?;
        Ok(HybridStep { u0, r0, u1: self.u, r1: self.r, clock: Clock::Natural })
    }

    fn natural_step<G: Rng + ?Sized>(&mut self, rng: &mut G, u_stop: f64) -> Result<()> {
        let cfg = self.cfg;
        let near = cfg.refine * (self.r - 1.0);
        let cap = cfg.dt_natural.max((1.0 + self.u) * cfg.dt_geometric);
        let mut target = (near * near).min(cap);
        if self.r < self.ceiling {
            let up = cfg.refine * (self.ceiling - self.r);
            target = target.min((up * up).max(CEILING_MIN_STEP));
        }
        let remaining = u_stop - self.u;
        let lands = remaining <= target;
        let du = if lands { remaining } else { target };
        let floor = 1.0 + cfg.boundary_guard;
        let (used, y) = guarded_euler(self.r, drift_r(self.r), du, cfg.max_halvings, rng, |_, y| y > floor)
            .map_err(|f| f.at(self.u))?;
        self.u = if lands && used == du { u_stop } else { self.u + used };
        self.r = y;
        Ok(())
    }

    fn geometric_step<G: Rng + ?Sized>(&mut self, rng: &mut G, u_stop: f64, s_stop: f64) -> Result<()> {
        let cfg = self.cfg;
        let remaining = s_stop - self.s;
        let lands = remaining <= cfg.dt_geometric;
        let mut ds = if lands { remaining } else { cfg.dt_geometric };
        let mut sqrt_ds = if lands { ds.sqrt() } else { self.sqrt_dt_geo };
        let drift = drift_x(self.x, self.s);
        let floor = 1.0 + cfg.boundary_guard;
        for _ in 0..=cfg.max_halvings {
            let z: f64 = rng.sample(StandardNormal);
            let y = self.x + drift * ds + sqrt_ds * z;
            if !y.is_finite() {
                return Err(Error::NonFinite { time: self.u });
            }
            let full = lands && ds == remaining;
            let s1 = if full { s_stop } else { self.s + ds };
            let scale1 = if full { (1.0 + u_stop).sqrt() } else { (0.5 * s1).exp() };
            let r1 = y * scale1;
            if y > 0.0 && r1 > floor {
                self.u = if full {
                    u_stop
                } else if s1 > 1.0 {
                    scale1 * scale1 - 1.0
                } else {
                    s1.exp_m1()
                };
                self.s = s1;
                self.x = y;
                self.scale = scale1;
                self.r = r1;
                return Ok(());
            }
            ds *= 0.5;
            sqrt_ds = ds.sqrt();
        }
        Err(Error::DriftDenominatorUnderflow { time: self.s })
    }
}

/// `R(u_end)` from `r0`, integrated with the hybrid clock and floor 1.
pub fn hybrid_endpoint<G: Rng + ?Sized>(
    r0: f64,
    u_end: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<f64> {
    if !(u_end.is_finite() && u_end >= 0.0) {
        return Err(Error::InvalidInput("horizon must be finite and non-negative"));
    }
    let mut eng = HybridIntegrator::new(r0, cfg)?;
    if u_end == 0.0 {
        return Ok(r0);
    }
    while eng.time() < u_end {
        eng.step(rng, u_end)?;
    }
    Ok(eng.value())
}

/// The hybrid radial path on `[0, u_end]`, on its adaptive natural-time grid.
pub fn hybrid_path<G: Rng + ?Sized>(
    r0: f64,
    u_end: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<TrajectoryGrid> {
    if !(u_end.is_finite() && u_end >= 0.0) {
        return Err(Error::InvalidInput("horizon must be finite and non-negative"));
    }
    let mut eng = HybridIntegrator::new(r0, cfg)?;
    let mut times: Vec<f64> = alloc::vec![0.0];
    let mut values: Vec<f64> = alloc::vec![r0];
    while eng.time() < u_end {
        let step = eng.step(rng, u_end)?;
        times.push(step.u1);
        values.push(step.r1);
    }
    TrajectoryGrid::new(times, values, PathKind::R)
}
