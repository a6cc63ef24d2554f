//! Closed-form laws of one regeneration cycle and of the scaling limits,
//! with exact samplers and the bound evaluators used by the diagnostics.

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;
use rand::Rng;

use crate::{Error, Result};

/// The cycle ratio `r > 1`: a cycle starts when `R` first reaches `r` times
/// the previous record.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CycleLawParams {
    r: f64,
}

impl CycleLawParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 1.0 && r.is_finite()) {
            return Err(Error::InvalidInput("cycle ratio must be finite and > 1"));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn ln_r(&self) -> f64 {
        self.r.ln()
    }
}

/// Free constants of the asymptotic envelopes. Only their existence is
/// known, so every value here is a diagnostic choice.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvelopeParams {
    /// Correction constant of the `T`-tail band.
    pub c: f64,
    /// Slack of the lower-tail exponents.
    pub epsilon: f64,
    /// Upper escape-envelope constant.
    pub k: f64,
    /// Lower escape-envelope constant.
    pub k_prime: f64,
    /// Scale of the `S_n` threshold.
    pub beta: f64,
}

impl EnvelopeParams {
    /// `C = 5`, `ε = 0.1` (halved until it fits under `r - 1`),
    /// `K = r √(2(r+1)/(r-1))`, `K' = K/2`, `β = 1`.
    pub fn default_for(params: &CycleLawParams) -> Self {
        let r = params.r();
        let k = r * (2.0 * (r + 1.0) / (r - 1.0)).sqrt();
        let mut epsilon = 0.1;
        while epsilon >= r - 1.0 {
            epsilon /= 2.0;
        }
        Self { c: 5.0, epsilon, k, k_prime: k / 2.0, beta: 1.0 }
    }

    pub fn validate(&self, params: &CycleLawParams) -> Result<()> {
        if !(self.c >= 0.0) {
            return Err(Error::InvalidInput("C must be >= 0"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < params.r() - 1.0) {
            return Err(Error::InvalidInput("epsilon must lie in (0, r - 1)"));
        }
        if !(self.k > self.k_prime && self.k_prime > 0.0) {
            return Err(Error::InvalidInput("need K > K' > 0"));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidInput("beta must be > 0"));
        }
        Ok(())
    }
}

/// Joint density of `(U, V)`: `(1-u)/(v-u)^2` on `0 < u < 1 < v`.
pub fn density_uv(u: f64, v: f64) -> f64 {
    if u > 0.0 && u < 1.0 && v > 1.0 {
        (1.0 - u) / ((v - u) * (v - u))
    } else {
        0.0
    }
}

/// Maps two uniforms to `(U, V)`: `U = u`, and `V` inverts the conditional
/// CDF `1 - (1-u)/(v-u)` at `q`.
pub fn uv_from_uniforms(u: f64, q: f64) -> (f64, f64) {
    (u, u + (1.0 - u) / (1.0 - q))
}

pub fn sample_uv<G: Rng + ?Sized>(rng: &mut G) -> (f64, f64) {
    let u = open_unit(rng);
    let q = open_unit(rng);
    uv_from_uniforms(u, q)
}

/// Uniform on the open interval `(0, 1)`.
pub(crate) fn open_unit<G: Rng + ?Sized>(rng: &mut G) -> f64 {
    loop {
        let x: f64 = rng.random();
        if x > 0.0 {
            return x;
        }
    }
}

/// `P(V > v) = Σ_{n≥1} 1/(n(n+1) vⁿ) = 1 + (v-1) ln(1 - 1/v)`.
///
/// The closed form is evaluated as `1 - δ ln(1 + 1/δ)` with `δ = v - 1`,
/// which stays accurate all the way down to `v = 1`; for `v ≥ 4` the series
/// is used instead, where the closed form would cancel.
pub fn tail_v(v: f64) -> f64 {
    if !(v > 1.0) {
        return 1.0;
    }
    if v >= 4.0 {
        return tail_v_series(v, 200);
    }
    let d = v - 1.0;
    1.0 - d * (1.0 / d).ln_1p()
}

/// Partial sums of the defining series; stops after `max_terms` or once a
/// term drops below `1e-16` of the running sum.
pub fn tail_v_series(v: f64, max_terms: usize) -> f64 {
    if !(v > 1.0) {
        return 1.0;
    }
    let inv = 1.0 / v;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for n in 1..=max_terms {
        pow *= inv;
        let nf = n as f64;
        let term = pow / (nf * (nf + 1.0));
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

/// Global future minimum of `R` started at `b`: `b^q`, whose CDF on `(1, b)`
/// is `ln a / ln b`.
pub fn sample_future_min<G: Rng + ?Sized>(b: f64, rng: &mut G) -> Result<f64> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(Error::InvalidInput("future minimum needs a finite start > 1"));
    }
    Ok(b.powf(open_unit(rng)))
}

/// `P_{r0}[τ(b) < τ(a)] = ln(r0/a) ln b / (ln(b/a) ln r0)`, from the scale
/// function `1 - 1/ln r`.
pub fn exit_prob(a: f64, r0: f64, b: f64) -> Result<f64> {
    if !(a > 1.0 && a <= r0 && r0 <= b && b.is_finite()) {
        return Err(Error::InvalidInput("exit probability needs 1 < a <= r0 <= b"));
    }
    if r0 == a {
        return Ok(0.0);
    }
    if r0 == b {
        return Ok(1.0);
    }
    Ok(((r0 / a).ln() * b.ln()) / ((b / a).ln() * r0.ln()))
}

/// CDF of the cycle exponent `U` when the record is only tracked until `R`
/// reaches `r^k`: `u(k-1)/(k-u)` on `[0, 1]`, which tends to the uniform
/// law as `k → ∞`; its largest deviation from it is `(√k - √(k-1))² ≈ 1/(4k)`.
pub fn truncated_u_cdf(u: f64, k: u32) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let k = k as f64;
    u * (k - 1.0) / (k - u)
}

/// The standard Rayleigh law `x e^{-x²/2} dx` on `(0, ∞)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RayleighLaw;

impl RayleighLaw {
    pub fn pdf(&self, x: f64) -> f64 {
        rayleigh_pdf(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        rayleigh_cdf(x)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        (-2.0 * (-p).ln_1p()).sqrt()
    }

    pub fn median(&self) -> f64 {
        rayleigh_median()
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> f64 {
        rayleigh_sample(rng)
    }
}

pub fn rayleigh_pdf(x: f64) -> f64 {
    if x > 0.0 {
        x * (-0.5 * x * x).exp()
    } else {
        0.0
    }
}

pub fn rayleigh_cdf(x: f64) -> f64 {
    if x > 0.0 {
        -(-0.5 * x * x).exp_m1()
    } else {
        0.0
    }
}

pub fn rayleigh_median() -> f64 {
    (2.0 * core::f64::consts::LN_2).sqrt()
}

/// Inversion: `√(-2 ln(1 - q))`.
pub fn rayleigh_sample<G: Rng + ?Sized>(rng: &mut G) -> f64 {
    let q: f64 = rng.random();
    (-2.0 * (-q).ln_1p()).sqrt()
}

/// Hoeffding bound `P[2 Σ_{j≤i} U_j ≥ c i] ≤ e^{-i(c-1)²/2}`; vacuous (1)
/// for `c ≤ 1`.
pub fn hoeffding_upper(i: u64, c: f64) -> f64 {
    if c <= 1.0 {
        return 1.0;
    }
    (-(i as f64) * (c - 1.0) * (c - 1.0) / 2.0).exp()
}

/// Hoeffding bound `P[2 Σ_{j≤i} U_j ≤ b i] ≤ e^{-i(1-b)²/2}`; vacuous (1)
/// for `b ≥ 1`.
pub fn hoeffding_lower(i: u64, b: f64) -> f64 {
    if b >= 1.0 {
        return 1.0;
    }
    (-(i as f64) * (1.0 - b) * (1.0 - b) / 2.0).exp()
}

/// `P(T ≥ t)` envelope `(ln r / ln t)(1 ∓ (ln₃ t + C)/ln t)`, as
/// `(lower, central, upper)` with the lower value clipped at 0.
pub fn t_tail_envelope(
    t: f64,
    params: &CycleLawParams,
    env: &EnvelopeParams,
) -> Result<(f64, f64, f64)> {
    if !(t > core::f64::consts::E) {
        return Err(Error::InvalidInput("T-tail envelope needs t > e"));
    }
    if !(env.c >= 0.0) {
        return Err(Error::InvalidInput("C must be >= 0"));
    }
    let lt = t.ln();
    let central = params.ln_r() / lt;
    let band = (iterated_log(3, t) + env.c) / lt;
    Ok(((central * (1.0 - band)).max(0.0), central, central * (1.0 + band)))
}

/// Lower-tail envelopes `(exp(-(r-1+ε)²/2t), exp(-(r-1-ε)²/2t))` for
/// `P(T ≤ t)`. `ε = 0` is accepted and collapses the pair.
pub fn t_lower_tail_envelope(t: f64, params: &CycleLawParams, epsilon: f64) -> Result<(f64, f64)> {
    let gap = params.r() - 1.0;
    if !(t > 0.0) {
        return Err(Error::InvalidInput("lower-tail envelope needs t > 0"));
    }
    if !(epsilon >= 0.0 && epsilon < gap) {
        return Err(Error::InvalidInput("epsilon must lie in [0, r - 1)"));
    }
    let lo = (-(gap + epsilon).powi(2) / (2.0 * t)).exp();
    let hi = (-(gap - epsilon).powi(2) / (2.0 * t)).exp();
    Ok((lo, hi))
}

/// `ln_k t` with `L(t) = ln(t ∨ 1)`, so never negative. `k = 0` is the
/// identity.
pub fn iterated_log(k: u32, t: f64) -> f64 {
    let mut x = t;
    for _ in 0..k {
        x = if x > 1.0 { x.ln() } else { 0.0 };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RunningStats;
    use crate::rng::task_rng;

    /// Adaptive Simpson on `[a, b]`.
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                return left + right + delta / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
    }

    /// `∫_1^∞ g(v) dv` through `v = 1/w`.
    fn over_v(g: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
        simpson(&|w: f64| if w <= 0.0 { 0.0 } else { g(1.0 / w) / (w * w) }, 0.0, 1.0, tol)
    }

    #[test]
    fn truncated_u_cdf_is_a_missed_exit() {
        let r: f64 = 2.0;
        for k in [2u32, 8, 30] {
            for u in [0.1, 0.5, 0.9] {
                let top = r.powi(k as i32);
                let want = 1.0 - exit_prob(r.powf(u), r, top).unwrap();
                assert!((truncated_u_cdf(u, k) - want).abs() < 1e-14);
                let gap = (k as f64).sqrt() - (k as f64 - 1.0).sqrt();
                assert!((truncated_u_cdf(u, k) - u).abs() <= gap * gap + 1e-15);
            }
            assert_eq!(truncated_u_cdf(1.0, k), 1.0);
        }
    }

    #[test]
    fn density_examples() {
        assert!((density_uv(0.5, 2.0) - 0.5 / 2.25).abs() < 1e-16);
        assert_eq!(density_uv(0.5, 0.9), 0.0);
        assert_eq!(density_uv(1.2, 2.0), 0.0);
    }

    #[test]
    fn u_marginal_is_flat() {
        for j in 0..20 {
            let u = (j as f64 + 0.5) / 20.0;
            let m = over_v(&|v| density_uv(u, v), 1e-12);
            assert!((m - 1.0).abs() < 1e-8, "u = {u}: {m}");
        }
    }

    #[test]
    fn density_has_unit_mass() {
        let mass = simpson(&|u| over_v(&|v| density_uv(u, v), 1e-10), 0.0, 1.0, 1e-9);
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn sampler_inverts_the_conditional_cdf() {
        assert_eq!(uv_from_uniforms(0.0, 0.5), (0.0, 2.0));
        let mut rng = task_rng(1, 0);
        let mut above = RunningStats::new();
        for _ in 0..100_000 {
            let (u, v) = sample_uv(&mut rng);
            assert!(0.0 < u && u < 1.0 && 1.0 < v);
            above.push(if v > 2.0 { 1.0 } else { 0.0 });
        }
        let p = 1.0 - core::f64::consts::LN_2;
        assert!((above.mean() - p).abs() < 3.0 * above.std_error());
    }

    #[test]
    fn tail_v_values() {
        assert_eq!(tail_v(1.0), 1.0);
        assert!((tail_v(2.0) - 0.306_852_819_440_054_69).abs() < 1e-15);
        assert!((tail_v(10.0) - 0.051_755_359_079_563_289).abs() < 1e-15);
        assert!((tail_v(1.01) - 0.953_848_794_831_587_41).abs() < 1e-14);
        assert!((1e4 * tail_v(1e4) - 0.500_016_667_500_05).abs() < 1e-12);
        assert!((10.0 * tail_v(10.0) - 0.5).abs() / 0.5 < 0.04);
        // Continuity through the closed form near 1.
        let near = tail_v(1.0 + 1e-9);
        assert!(near < 1.0 && near > 1.0 - 1e-7);
    }

    #[test]
    fn tail_v_series_agrees_with_closed_form() {
        let mut v = 1.01;
        let mut prev = 1.0;
        while v <= 100.0 {
            let closed = 1.0 + (v - 1.0) * (1.0 - 1.0 / v).ln();
            let series = tail_v_series(v, 100_000);
            assert!((closed - series).abs() < 1e-10, "v = {v}");
            assert!((tail_v(v) - series).abs() < 1e-10, "v = {v}");
            assert!(tail_v(v) < prev);
            prev = tail_v(v);
            v *= 1.07;
        }
    }

    #[test]
    fn future_min_law() {
        let mut rng = task_rng(2, 0);
        let b = core::f64::consts::E.powi(2);
        let mut below = RunningStats::new();
        for _ in 0..100_000 {
            let m = sample_future_min(b, &mut rng).unwrap();
            assert!(m > 1.0 && m < b);
            below.push(if m <= core::f64::consts::E { 1.0 } else { 0.0 });
        }
        assert!((below.mean() - 0.5).abs() < 3.0 * below.std_error());
        assert!(sample_future_min(1.0, &mut rng).is_err());
    }

    #[test]
    fn exit_probability() {
        assert!((exit_prob(2.0, 4.0, 16.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(exit_prob(3.0, 3.0, 9.0).unwrap(), 0.0);
        assert_eq!(exit_prob(3.0, 9.0, 9.0).unwrap(), 1.0);
        assert!(exit_prob(1.0, 2.0, 3.0).is_err());
        assert!(exit_prob(2.0, 5.0, 3.0).is_err());
        let mut prev = 0.0;
        for j in 1..50 {
            let p = exit_prob(2.0, 2.0 + 0.28 * j as f64, 16.0).unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn rayleigh_law() {
        let law = RayleighLaw;
        assert_eq!(law.cdf(0.0), 0.0);
        assert!((law.median() - 1.177_410_022_515_474_7).abs() < 1e-15);
        assert!((law.cdf(law.median()) - 0.5).abs() < 1e-15);
        assert!((law.quantile(law.cdf(1.3)) - 1.3).abs() < 1e-14);
        let mass = simpson(&|x| law.pdf(x), 0.0, 12.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-8);
        let second = simpson(&|x| x * x * law.pdf(x), 0.0, 14.0, 1e-12);
        assert!((second - 2.0).abs() < 1e-8);

        let mut rng = task_rng(3, 0);
        let sq: RunningStats = (0..100_000).map(|_| law.sample(&mut rng).powi(2)).collect();
        assert!((sq.mean() - 2.0).abs() < 3.0 * sq.std_error());
    }

    #[test]
    fn hoeffding_bounds() {
        assert!((hoeffding_upper(8, 2.0) - 0.018_315_638_888_734_18).abs() < 1e-16);
        assert_eq!(hoeffding_upper(5, 1.0), 1.0);
        assert_eq!(hoeffding_lower(5, 1.0), 1.0);
        assert!((hoeffding_lower(8, 0.0) - (-4.0f64).exp()).abs() < 1e-16);

        let mut rng = task_rng(4, 0);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| 2.0 * (0..20).map(|_| rng.random::<f64>()).sum::<f64>() >= 30.0)
            .count();
        assert!((hits as f64 / trials as f64) <= hoeffding_upper(20, 1.5));
    }

    #[test]
    fn t_tail_envelope_shape() {
        let p = CycleLawParams::new(core::f64::consts::E).unwrap();
        let env = EnvelopeParams::default_for(&p);
        let (lo, c, hi) = t_tail_envelope(10f64.exp(), &p, &env).unwrap();
        assert!((c - 0.1).abs() < 1e-15);
        assert!(lo <= c && c <= hi && lo >= 0.0);
        let mut prev_c = f64::INFINITY;
        let mut prev_rel = f64::INFINITY;
        for j in 1..40 {
            let t = 10f64.powi(j);
            let (_, c, hi) = t_tail_envelope(t, &p, &env).unwrap();
            assert!(c < prev_c);
            prev_c = c;
            if j > 5 {
                let rel = hi / c - 1.0;
                assert!(rel < prev_rel);
                prev_rel = rel;
            }
        }
        assert!(t_tail_envelope(2.0, &p, &env).is_err());
    }

    #[test]
    fn lower_tail_envelope() {
        let p = CycleLawParams::new(2.0).unwrap();
        let (lo, hi) = t_lower_tail_envelope(0.2, &p, 0.0).unwrap();
        assert!((lo - 0.082_084_998_623_898_795).abs() < 1e-16);
        assert_eq!(lo, hi);
        for j in 1..30 {
            let (lo, hi) = t_lower_tail_envelope(j as f64 * 0.05, &p, 0.3).unwrap();
            assert!(hi >= lo);
        }
        let (lo, hi) = t_lower_tail_envelope(1e-3, &p, 0.1).unwrap();
        assert!(lo < 1e-100 && hi < 1e-100);
        assert!(t_lower_tail_envelope(0.2, &p, 1.0).is_err());
    }

    #[test]
    fn iterated_logs() {
        assert_eq!(iterated_log(1, 0.5), 0.0);
        let eee = core::f64::consts::E.exp().exp();
        assert!((iterated_log(3, eee) - 1.0).abs() < 1e-14);
        assert!((iterated_log(2, 10f64.exp()) - 10f64.ln()).abs() < 1e-15);
        assert_eq!(iterated_log(3, 3.0), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(CycleLawParams::new(1.0).is_err());
        let p = CycleLawParams::new(2.0).unwrap();
        let env = EnvelopeParams::default_for(&p);
        assert!(env.validate(&p).is_ok());
        assert!((env.k - 2.0 * 6f64.sqrt()).abs() < 1e-14);
        let tight = CycleLawParams::new(1.05).unwrap();
        assert!(EnvelopeParams::default_for(&tight).validate(&tight).is_ok());
    }
}
