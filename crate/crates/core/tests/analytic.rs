use proptest::prelude::*;
use smallcell::analytic::{rate_cdf_conditional, sir_cdf_conditional, ChannelParams};
use smallcell::pmf::Pmf;

fn mark_pmf() -> impl Strategy<Value = Pmf> {
    prop::collection::vec(0.0f64..1.0, 1..5).prop_filter_map("some mass", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-3).then(|| Pmf::from_probs(w.iter().map(|x| x / total).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sir_cdf_is_a_cdf(alpha in 2.2f64..6.0, m in 1usize..5, mark in mark_pmf(), lo in -20.0f64..30.0, step in 0.0f64..10.0) {
        let (a, b) = (10f64.powf(lo / 10.0), 10f64.powf((lo + step) / 10.0));
        let fa = sir_cdf_conditional(a, m, &mark, alpha).unwrap();
        let fb = sir_cdf_conditional(b, m, &mark, alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&fa) && (0.0..=1.0).contains(&fb));
        prop_assert!(fb >= fa - 1e-9);
    }

    #[test]
    fn rate_cdf_is_a_cdf(alpha in 2.5f64..5.0, theta0_db in -5.0f64..10.0, k0 in 1usize..6, n in 1usize..20, r in 0.0f64..2.0, dr in 0.0f64..1.0, mark in mark_pmf()) {
        let p = ChannelParams::new(alpha, 10f64.powf(theta0_db / 10.0)).unwrap();
        let m = k0.min(2);
        let fa = rate_cdf_conditional(r, k0, m, n, p, &mark).unwrap();
        let fb = rate_cdf_conditional(r + dr, k0, m, n, p, &mark).unwrap();
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert!(fb >= fa - 1e-9);
    }

    #[test]
    fn concentrated_interferer_gains_raise_outage(alpha in 2.5f64..5.0, theta_db in -10.0f64..20.0, m in 1usize..4) {
        // same mean interference, but (1 + s/k)^(-k) falls with k
        let theta = 10f64.powf(theta_db / 10.0);
        let one = sir_cdf_conditional(theta, m, &Pmf::degenerate(1, 4), alpha).unwrap();
        let three = sir_cdf_conditional(theta, m, &Pmf::degenerate(3, 4), alpha).unwrap();
        prop_assert!(three >= one - 1e-9, "{three} < {one}");
    }
}
