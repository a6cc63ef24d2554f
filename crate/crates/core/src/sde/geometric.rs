//! The geometric clock: `X(s) = e^{-s/2} R(e^s - 1)`.
//!
//! In this clock `X` solves
//! `dX = (1/(2X) - X/2 + 1/(X (ln X + s/2))) ds + dβ`, whose last drift term
//! depends on absolute geometric time. Reaching natural time `u` costs
//! `ln(1 + u)` units of geometric time, which is what makes very large
//! horizons affordable.

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;
use alloc::vec::Vec;

use rand::Rng;

use super::{guarded_euler, PathKind, StepFailure, TrajectoryGrid};
use crate::{Error, IntegratorConfig, Result};

/// Drift of `X` at state `x` and absolute geometric time `s`.
#[inline]
pub fn drift_x(x: f64, s: f64) -> f64 {
    0.5 / x - 0.5 * x + 1.0 / (x * (x.ln() + 0.5 * s))
}

/// One geometric Euler step from `(s, x)`. Rejects proposals whose radial
/// value `e^{s/2} X` would fall to `1 + guard`.
#[inline]
pub(crate) fn geometric_step<G: Rng + ?Sized>(
    s: f64,
    x: f64,
    ds: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<(f64, f64)> {
    let ln_floor = cfg.boundary_guard.ln_1p();
    let drift = drift_x(x, s);
    guarded_euler(x, drift, ds, cfg.max_halvings, rng, |h, y| {
        y > 0.0 && y.ln() + 0.5 * (s + h) > ln_floor
    })
    .map_err(|f| match f {
        StepFailure::Exhausted => Error::DriftDenominatorUnderflow { time: s },
        StepFailure::NonFinite => Error::NonFinite { time: s },
    })
}

/// Integrates `X` on `[s_origin, s_origin + s_horizon]` from `x0`.
///
/// The drift uses absolute geometric time, so a path can be resumed from any
/// `s_origin`. A start exactly on the unit circle (`ln x0 + s_origin/2 = 0`)
/// is displaced to radial value `1 + boundary_guard`.
pub fn integrate_x<G: Rng + ?Sized>(
    x0: f64,
    s_horizon: f64,
    s_origin: f64,
    cfg: &IntegratorConfig,
    rng: &mut G,
) -> Result<TrajectoryGrid> {
    cfg.validate()?;
    if !(x0.is_finite() && x0 > 0.0) {
        return Err(Error::InvalidInput("x0 must be positive"));
    }
    if !(s_origin.is_finite() && s_origin >= 0.0 && s_horizon.is_finite() && s_horizon >= 0.0) {
        return Err(Error::InvalidInput("geometric times must be finite and non-negative"));
    }
    let mut times = alloc::vec![s_origin];
    let mut values = alloc::vec![x0];
    if s_horizon == 0.0 {
        return TrajectoryGrid::new(times, values, PathKind::X);
    }
    let ln_r0 = x0.ln() + 0.5 * s_origin;
    if ln_r0 < 0.0 {
        return Err(Error::InvalidInput("x0 represents a radial value inside the unit disk"));
    }
    let mut x = if ln_r0 <= cfg.boundary_guard.ln_1p() {
        (1.0 + cfg.boundary_guard) * (-0.5 * s_origin).exp()
    } else {
        x0
    };
    let s_end = s_origin + s_horizon;
    let mut s = s_origin;
    while s < s_end {
        let remaining = s_end - s;
        let lands = remaining <= cfg.dt_geometric;
        let ds = if lands { remaining } else { cfg.dt_geometric };
        let (used, y) = geometric_step(s, x, ds, cfg, rng)?;
        s = if lands && used == ds { s_end } else { s + used };
        x = y;
        times.push(s);
        values.push(x);
    }
    TrajectoryGrid::new(times, values, PathKind::X)
}

/// Maps an `X` path to the radial path `R(u) = √(1+u) X(ln(1+u))`.
pub fn to_natural(x_path: &TrajectoryGrid) -> Result<TrajectoryGrid> {
    if x_path.kind() != PathKind::X {
        return Err(Error::InvalidInput("to_natural expects a geometric-time X path"));
    }
    let (times, values): (Vec<f64>, Vec<f64>) = x_path
        .times()
        .iter()
        .zip(x_path.values())
        .map(|(&s, &x)| (s.exp_m1(), x * (0.5 * s).exp()))
        .unzip();
    TrajectoryGrid::new(times, values, PathKind::R)
}

/// Maps a radial path to `X(s) = e^{-s/2} R(e^s - 1)`, `s = ln(1+u)`.
pub fn to_geometric(r_path: &TrajectoryGrid) -> Result<TrajectoryGrid> {
    if r_path.kind() != PathKind::R {
        return Err(Error::InvalidInput("to_geometric expects a natural-time R path"));
    }
    if r_path.times()[0] < 0.0 {
        return Err(Error::InvalidInput("natural times must be non-negative"));
    }
    let (times, values): (Vec<f64>, Vec<f64>) = r_path
        .times()
        .iter()
        .zip(r_path.values())
        .map(|(&u, &r)| {
            let s = u.ln_1p();
            (s, r * (-0.5 * s).exp())
        })
        .unzip();
    TrajectoryGrid::new(times, values, PathKind::X)
}
