use proptest::prelude::*;

use polya_aeppli::{cdf, kernel, oracle, pmf, quantile, DistParams};

fn any_params() -> impl Strategy<Value = DistParams> {
    (0.01f64..60.0, 0.0f64..0.95).prop_map(|(l, p)| DistParams::new(l, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_matches_direct_sum(p in any_params(), x in 0u64..120) {
        let t = kernel::log_pmf_table(p, x as usize).unwrap();
        let want = oracle::direct_pmf(x, p).unwrap().ln_value;
        let got = t.logp()[x as usize];
        prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn batch_order_does_not_matter(p in any_params(), mut xs in prop::collection::vec(0u32..200, 1..20)) {
        let fwd: Vec<f64> = xs.iter().map(|&x| f64::from(x)).collect();
        let a = cdf(&fwd, p, false, true).unwrap().values;
        xs.reverse();
        let rev: Vec<f64> = xs.iter().map(|&x| f64::from(x)).collect();
        let mut b = cdf(&rev, p, false, true).unwrap().values;
        b.reverse();
        prop_assert_eq!(&a, &b);
        for (i, &x) in fwd.iter().enumerate() {
            let single = cdf(&[x], p, false, true).unwrap().values[0];
            prop_assert_eq!(single.to_bits(), a[i].to_bits());
        }
    }

    #[test]
    fn tails_complement(p in any_params(), x in 0u32..150) {
        let x = f64::from(x);
        let f = cdf(&[x], p, true, false).unwrap().values[0];
        let s = cdf(&[x], p, false, false).unwrap().values[0];
        prop_assert!((f + s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_is_generalized_inverse(p in any_params(), u in 1e-6f64..0.999_999) {
        let q = quantile(&[u], p, true, false).unwrap().values[0];
        let at = cdf(&[q, q - 1.0], p, true, false).unwrap().values;
        prop_assert!(at[0] >= u && at[1] < u, "u {u} q {q} F {:?}", at);
    }

    #[test]
    fn upper_log_quantile_is_generalized_inverse(p in any_params(), lu in -300.0f64..-1e-3) {
        let q = quantile(&[lu], p, false, true).unwrap().values[0];
        let s = cdf(&[q, q - 1.0], p, false, true).unwrap().values;
        prop_assert!(s[0] <= lu && s[1] > lu, "lu {lu} q {q} S {:?}", s);
    }

    #[test]
    fn log_mass_is_never_nan_or_positive(p in any_params(), x in 0u32..500) {
        let v = pmf(&[f64::from(x)], p, true).unwrap().values[0];
        prop_assert!(!v.is_nan() && v <= 0.0);
    }
}
