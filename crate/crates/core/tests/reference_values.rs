//! Values frozen from 50-digit evaluations of the defining sums.

use polya_aeppli::{cdf, kernel, oracle, pmf, DistParams};

fn params(lambda: f64, prob: f64) -> DistParams {
    DistParams::new(lambda, prob).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn small_table_matches_direct_sum() {
    let p = params(2.0, 0.5);
    let t = kernel::log_pmf_table(p, 5).unwrap();
    for x in 0..=5 {
        let want = oracle::direct_pmf(x as u64, p).unwrap().value;
        assert!(rel(t.logp()[x].exp(), want) < 1e-13, "x = {x}");
    }
}

#[test]
fn lower_tail_at_ten() {
    let t = kernel::log_pmf_table(params(2.0, 0.5), 10).unwrap();
    let g = kernel::log_cdf_lower(&t);
    assert!(rel(g[10].exp(), 0.946_459_590_755_569_1) < 1e-12);
}

#[test]
fn tail_series_start() {
    let t = kernel::log_pmf_table(params(2.0, 0.5), 15).unwrap();
    let h = kernel::log_tail_init(&t, 15).unwrap();
    let want = -4.829_317_685_370_722_f64;
    assert!(rel(h.exp(), want.exp()) < 1e-10, "{h}");
}

#[test]
fn upper_log_cdf_at_twenty() {
    let v = cdf(&[20.0], params(2.0, 0.5), false, true).unwrap().values[0];
    assert!((v - (-6.907_138_350_575_248)).abs() < 1e-10, "{v}");
}

#[test]
fn poisson_tail_through_kernel() {
    let t = kernel::log_pmf_table(params(8.0, 0.0), 40).unwrap();
    let h = kernel::log_tail_init(&t, 40).unwrap();
    assert!((h - (-36.567_056_656_955_36)).abs() < 1e-10, "{h}");
}

#[test]
fn poisson_log_mass() {
    let xs: Vec<f64> = (0..=20).map(f64::from).collect();
    let l = pmf(&xs, params(8.0, 0.0), true).unwrap().values;
    for (x, v) in l.iter().enumerate() {
        let want = oracle::poisson_reference(x as u64, 8.0).unwrap().ln_value;
        assert!((v - want).abs() < 1e-13 * want.abs().max(1.0), "x = {x}");
    }
}

#[test]
fn survival_at_zero() {
    for (lambda, prob) in [(0.5, 0.9), (2.0, 0.5), (20.0, 0.1)] {
        let t = kernel::log_pmf_table(params(lambda, prob), 1).unwrap();
        let h = kernel::log_survival(&t, 0).unwrap();
        assert!((h[0] - (-(-lambda).exp()).ln_1p()).abs() < 1e-13);
    }
}

#[test]
fn tails_sum_to_one_small_case() {
    let xs: Vec<f64> = (0..=20).map(f64::from).collect();
    let p = params(2.0, 0.5);
    let f = cdf(&xs, p, true, false).unwrap().values;
    let s = cdf(&xs, p, false, false).unwrap().values;
    for (a, b) in f.iter().zip(&s) {
        assert!((a + b - 1.0).abs() < 1e-13);
    }
}
