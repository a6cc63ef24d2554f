//! The renewal construction against single long paths: the pairs
//! `(T_i, A_i)` read off one trajectory must have the law of the ones
//! assembled from independent cycles.
//!
//! Cycles stop tracking their record once `R` reaches `r^k`, which biases `U`
//! upwards by up to about `1/(4k)`; at the sample sizes used here that is
//! visible, so `U` is compared with its exact truncated law.

use moustache_core::estimators::{ks_distance, ks_two_sample};
use moustache_core::laws::truncated_u_cdf;
use moustache_core::regeneration::{assemble_renewal, direct_renewal, simulate_pool, InOrder};
use moustache_core::rng::task_rng;
use moustache_core::{CycleLawParams, IntegratorConfig};

const SEED: u64 = 77;

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default().with_seed(SEED)
}

#[test]
fn cycle_minimum_exponent_follows_truncated_law() {
    let p = CycleLawParams::new(2.0).unwrap();
    let pool = simulate_pool(&p, 12, 5000, &cfg()).unwrap();
    let us: Vec<f64> = pool.records().iter().map(|c| c.u).collect();
    let ks = ks_distance(&us, |x| truncated_u_cdf(x, 12)).unwrap();
    assert!(ks.pass, "D = {} >= {}", ks.d_n, ks.threshold);
    assert_eq!(pool.records().iter().filter(|c| c.degenerate).count(), 0);
}

#[test]
fn successive_minima_are_self_similar() {
    // A_2 / A_1 has the law of A_1.
    let p = CycleLawParams::new(2.0).unwrap();
    let c = cfg();
    let runs = 3000;
    let (mut first, mut ratio) = (Vec::with_capacity(runs), Vec::with_capacity(runs));
    for i in 0..runs as u64 {
        let pairs = direct_renewal(&p, 2, 8, &c, &mut task_rng(SEED, i)).unwrap();
        first.push(pairs[0].1);
        ratio.push(pairs[1].1 - pairs[0].1);
    }
    let ks = ks_two_sample(&first, &ratio).unwrap();
    assert!(ks.pass, "D = {} >= {}", ks.d_n, ks.threshold);
    let ln_r = p.ln_r();
    let u = ks_distance(&first.iter().map(|a| a / ln_r).collect::<Vec<_>>(), |x| truncated_u_cdf(x, 8)).unwrap();
    assert!(u.pass, "first minimum: D = {}", u.d_n);
}

#[test]
fn assembled_sequence_matches_direct_paths() {
    let p = CycleLawParams::new(2.0).unwrap();
    let (n, runs) = (5, 1000);
    let c = cfg();
    let pool = simulate_pool(&p, 8, n * runs, &c).unwrap();
    let mut src = InOrder::new(&pool);
    let mut rng = task_rng(0, 0);
    let (mut a_asm, mut t_asm) = (Vec::new(), Vec::new());
    for _ in 0..runs {
        let seq = assemble_renewal(&mut src, n, &mut rng).unwrap();
        a_asm.push(seq.ln_a[n - 1]);
        t_asm.push(seq.ln_t[n - 1]);
    }
    let (mut a_dir, mut t_dir) = (Vec::new(), Vec::new());
    let direct_cfg = c.with_seed(SEED + 1);
    for i in 0..runs as u64 {
        let pairs = direct_renewal(&p, n, 8, &direct_cfg, &mut task_rng(SEED + 1, i)).unwrap();
        t_dir.push(pairs[n - 1].0);
        a_dir.push(pairs[n - 1].1);
    }
    let ks_a = ks_two_sample(&a_asm, &a_dir).unwrap();
    assert!(ks_a.pass, "ln A_5: D = {} >= {}", ks_a.d_n, ks_a.threshold);
    let ks_t = ks_two_sample(&t_asm, &t_dir).unwrap();
    assert!(ks_t.pass, "ln T_5: D = {} >= {}", ks_t.d_n, ks_t.threshold);
}
