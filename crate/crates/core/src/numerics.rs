//! Small numerical helpers shared by the simulation modules.

#[allow(unused_imports)] // shadowed by std's inherent methods whenever std is linked
use num_traits::Float;


/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; `-∞` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY || hi == f64::INFINITY {
        return hi;
    }
    let sum: f64 = xs.iter().map(|&x| (x - hi).exp()).sum();
    hi + sum.ln()
}

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_add_exp_matches_direct_sum() {
        let (a, b) = (1.5_f64, -0.25_f64);
        let direct = (a.exp() + b.exp()).ln();
        assert!((ln_add_exp(a, b) - direct).abs() < 1e-15);
        assert_eq!(ln_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
    }

    #[test]
    fn ln_add_exp_survives_huge_arguments() {
        // e^1000 overflows, the log-domain sum must not.
        let v = ln_add_exp(1000.0, 1000.0);
        assert!((v - (1000.0 + core::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_empty_and_singleton() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[2.0]), 2.0);
    }

    #[test]
    fn running_stats_known_values() {
        let s: RunningStats = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(s.mean(), 2.5);
        assert!((s.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.std_error() - (5.0 / 12.0_f64).sqrt()).abs() < 1e-15);
    }
}
