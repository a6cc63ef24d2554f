use super::*;
use crate::rng::task_rng;

fn unit_cycles(r: f64) -> (CycleLawParams, impl FnMut(usize) -> CycleDraw) {
    let _ = r;
    (CycleLawParams::new(r).unwrap(), |_| CycleDraw { u: 1.0, ln_tp: 0.0 })
}

#[test]
fn degenerate_cycles_give_the_geometric_sum() {
    let r = 1.5f64;
    let (p, f) = unit_cycles(r);
    let mut src = FromFn::new(&p, f);
    let n = 400;
    let seq = assemble_renewal(&mut src, n, &mut task_rng(1, 0)).unwrap();
    for (i, &lt) in seq.ln_t.iter().enumerate() {
        let m = (i + 1) as f64;
        // ln((r^{2m} - 1)/(r² - 1)), evaluated without overflow.
        let oracle = 2.0 * m * r.ln() + (-(-2.0 * m * r.ln()).exp()).ln_1p() - (r * r - 1.0).ln();
        assert!(((lt - oracle) / oracle).abs() < 1e-10 || (lt - oracle).abs() < 1e-13, "i = {i}");
        assert!((seq.ln_a[i] - m * r.ln()).abs() < 1e-12 * m);
    }
    let s = s_sequence(&seq);
    assert!((s[n - 1] - 1.0 / (r * r - 1.0)).abs() < 1e-12);
}

#[test]
fn base_case() {
    let p = CycleLawParams::new(2.0).unwrap();
    let mut src = FromFn::new(&p, |_| CycleDraw { u: 0.3, ln_tp: 1.7 });
    let seq = assemble_renewal(&mut src, 1, &mut task_rng(2, 0)).unwrap();
    assert_eq!(seq.ln_t[0], 1.7);
    assert!((seq.ln_a[0] - 0.3 * 2f64.ln()).abs() < 1e-16);
    let s1 = s_sequence(&seq)[0];
    assert!((s1 - 1.7f64.exp() * 2f64.powf(-0.6)).abs() < 1e-14);
    assert!(assemble_renewal(&mut src, 0, &mut task_rng(2, 0)).is_err());
}

fn synthetic_pool(n: usize, seed: u64) -> CyclePool {
    // Exact (U, T') pairs are not available in closed form; any positive T'
    // with U ∈ (0, 1) exercises the assembler.
    let p = CycleLawParams::new(2.0).unwrap();
    let mut rng = task_rng(seed, 0);
    let records = (0..n)
        .map(|_| {
            let u: f64 = open_unit(&mut rng);
            let a = 2f64.powf(u);
            let t = (30.0 * open_unit(&mut rng)).exp();
            CycleRecord::from_parts(&p, t * 0.5, t, a, 2.5, 30).unwrap()
        })
        .collect();
    CyclePool::new(records, p, 30, 0).unwrap()
}

#[test]
fn bootstrap_assembly_is_consistent() {
    let pool = synthetic_pool(500, 3);
    let mut src = Bootstrap::new(&pool).unwrap();
    let seq = assemble_renewal(&mut src, 100_000, &mut task_rng(3, 1)).unwrap();
    assert!(recursion_residual(&seq) < 1e-10);
    for i in 1..seq.len() {
        assert!(seq.ln_t[i] >= seq.ln_t[i - 1]);
        assert!(seq.ln_a[i] > seq.ln_a[i - 1]);
        assert!(seq.ln_t[i] >= 2.0 * seq.ln_a[i - 1] + seq.ln_tp[i] - 1e-12);
    }
    assert!(seq.ln_t.iter().all(|x| x.is_finite()));
}

#[test]
fn empty_sources_are_rejected() {
    let p = CycleLawParams::new(2.0).unwrap();
    let empty = CyclePool::new(Vec::new(), p, 30, 0).unwrap();
    assert_eq!(Bootstrap::new(&empty).unwrap_err(), Error::EmptySource);
    let pool = synthetic_pool(3, 4);
    let mut src = InOrder::new(&pool);
    assert_eq!(assemble_renewal(&mut src, 4, &mut task_rng(4, 0)).unwrap_err(), Error::EmptySource);
    let mut src = InOrder::new(&pool);
    let seq = assemble_renewal(&mut src, 3, &mut task_rng(4, 0)).unwrap();
    assert_eq!(seq.ln_tp[2], pool.records()[2].t.ln());
}

#[test]
fn sqrt_envelope_margin_is_minus_half_ln_s() {
    let pool = synthetic_pool(100, 5);
    let seq = assemble_renewal(&mut Bootstrap::new(&pool).unwrap(), 1000, &mut task_rng(5, 0)).unwrap();
    let rep = future_min_envelope(&seq, 0..1000, &SqrtEnvelope, Crossing::Above).unwrap();
    let s = s_sequence(&seq);
    for (m, s) in rep.margins.iter().zip(&s) {
        assert!((m + 0.5 * s.ln()).abs() < 1e-10);
    }
    assert_eq!(rep.skipped, 0);
    assert_eq!(rep.count(), rep.margins.iter().filter(|&&m| m > 0.0).count());
}

#[test]
fn envelopes_report_their_domain_and_failures() {
    let pool = synthetic_pool(100, 6);
    let seq = assemble_renewal(&mut Bootstrap::new(&pool).unwrap(), 50, &mut task_rng(6, 0)).unwrap();
    let esc = EscapeEnvelope { k: 2.0 };
    let rep = future_min_envelope(&seq, 0..80, &esc, Crossing::Above).unwrap();
    assert_eq!(rep.margins.len(), 50);
    let nan = |_: f64| Some(f64::NAN);
    assert_eq!(future_min_envelope(&seq, 3..10, &nan, Crossing::Below).unwrap_err(), Error::Envelope(3));
    let g = IntegralTestEnvelope { g: |u: f64| 3.0 / (u * u) };
    assert!(g.ln_value(0.5).is_none());
    assert!((g.ln_value(10f64.exp()).unwrap() - 10f64.exp() * 0.03).abs() < 1e-12);
}

#[test]
fn simulated_cycles_satisfy_record_invariants() {
    let p = CycleLawParams::new(2.0).unwrap();
    let cfg = IntegratorConfig::default();
    for i in 0..30 {
        let c = simulate_cycle_indexed(&p, 8, &cfg, i).unwrap();
        assert!(c.h > 0.0 && c.h <= c.t, "{c:?}");
        assert!(c.a > 1.0 && c.a <= 2.0 && c.b >= 2.0, "{c:?}");
        assert!(c.v <= 8.0 + 1e-12);
        assert!((2f64.powf(c.u) - c.a).abs() < 1e-14 * c.a);
        assert!((2f64.powf(c.v) - c.b).abs() < 1e-12 * c.b);
        assert!(c.err_bound > 0.0 && c.err_bound <= 1.0 / 8.0);
        assert!(!c.degenerate);
    }
}

#[test]
fn cycles_are_reproducible_per_index() {
    let p = CycleLawParams::new(3.0).unwrap();
    let cfg = IntegratorConfig::default().with_seed(11);
    let a = simulate_cycle_indexed(&p, 4, &cfg, 7).unwrap();
    let b = simulate_cycle_indexed(&p, 4, &cfg, 7).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, simulate_cycle_indexed(&p, 4, &cfg, 8).unwrap());
    assert!(simulate_cycle_indexed(&p, 1, &cfg, 0).is_err());
    assert!(simulate_cycle_indexed(&p, 1000, &cfg, 0).is_err());
}

#[test]
fn pool_rejects_mixed_truncation() {
    let p = CycleLawParams::new(2.0).unwrap();
    let c = CycleRecord::from_parts(&p, 1.0, 2.0, 1.5, 3.0, 10).unwrap();
    let d = CycleRecord { k: 11, ..c };
    assert!(CyclePool::new(alloc::vec![c, d], p, 10, 0).is_err());
    assert!(CycleRecord::from_parts(&p, 1.0, 0.5, 1.5, 3.0, 10).is_err());
    let pool = simulate_pool(&p, 5, 4, &IntegratorConfig::default()).unwrap();
    assert_eq!(pool.truncated(2).records(), &pool.records()[..2]);
}

#[test]
fn direct_renewal_is_monotone() {
    let p = CycleLawParams::new(2.0).unwrap();
    let pairs = direct_renewal(&p, 5, 6, &IntegratorConfig::default(), &mut task_rng(12, 0)).unwrap();
    assert_eq!(pairs.len(), 5);
    for w in pairs.windows(2) {
        assert!(w[1].0 > w[0].0 && w[1].1 > w[0].1);
        // A_{i+1} ≥ ... and the ratio A_{i+1}/A_i lies in (1, r].
        assert!(w[1].1 - w[0].1 <= 2f64.ln() + 1e-12);
    }
}
