use fracsym::fraccalc::{rl_numeric, rl_power_rule, rl_series, FracOrder, FracPowerSeries};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn numeric_scheme_converges_to_power_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let alpha = rng.gen_range(0.05..0.95);
        let mu: f64 = rng.gen_range(-0.49..3.0);
        let order = FracOrder::new(alpha).unwrap();
        let t: f64 = 0.8;
        let (c, e) = rl_power_rule(order, mu).unwrap();
        // a pure power with its own exponent declared is reproduced exactly,
        // so negative powers carry a smooth companion term
        let (exact, declared) = if mu < 0.0 {
            let (c1, e1) = rl_power_rule(order, mu + 1.0).unwrap();
            (c * t.powf(e) + c1 * t.powf(e1), mu)
        } else {
            (c * t.powf(e), 0.0)
        };
        let f = |s: f64| if mu < 0.0 { s.powf(mu) * (1.0 + s) } else { s.powf(mu) };
        let errs: Vec<f64> = [64.0, 128.0, 256.0]
            .iter()
            .map(|n| (rl_numeric(order, f, t, 1.0 / n, declared).unwrap() - exact).abs())
            .collect();
        let bound = (1.0 / 256f64).powf(2.0 - alpha) * (1.0 + exact.abs());
        assert!(errs[2] <= bound, "alpha={alpha} mu={mu}: {errs:?} > {bound}");
        if errs[2] > 1e-11 {
            let order_est = (errs[0] / errs[2]).log2() / 2.0;
            assert!(
                (1.6..=2.2).contains(&order_est),
                "alpha={alpha} mu={mu}: order {order_est} ({errs:?})"
            );
        }
    }
}

fn series_strategy() -> impl Strategy<Value = FracPowerSeries> {
    prop::collection::vec((-5.0..5.0f64, -0.9..4.0f64), 0..6)
        .prop_map(|t| FracPowerSeries::new(t).unwrap())
}

proptest! {
    #[test]
    fn rl_series_is_linear(
        s1 in series_strategy(),
        s2 in series_strategy(),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        alpha in 0.05..2.5f64,
    ) {
        let order = FracOrder::new(alpha).unwrap();
        let lhs = rl_series(order, &s1.scale(a).add(&s2.scale(b))).unwrap();
        let rhs = rl_series(order, &s1).unwrap().scale(a)
            .add(&rl_series(order, &s2).unwrap().scale(b));
        let scale = 1.0 + lhs.max_abs_coeff().max(rhs.max_abs_coeff());
        let diff = lhs.sub(&rhs);
        prop_assert!(diff.max_abs_coeff() <= 1e-12 * scale, "{:?}", diff);
    }

    #[test]
    fn power_rule_semigroup(alpha in 0.05..0.95f64, beta in 0.05..0.95f64, mu in -0.9..4.0f64) {
        let a = FracOrder::new(alpha).unwrap();
        let b = FracOrder::new(beta).unwrap();
        let (c1, e1) = rl_power_rule(b, mu).unwrap();
        prop_assume!(e1 > -1.0);
        let (c2, e2) = rl_power_rule(a, e1).unwrap();
        let ab = FracOrder::new(alpha + beta).unwrap();
        let (c3, e3) = rl_power_rule(ab, mu).unwrap();
        prop_assert!((e2 - e3).abs() < 1e-12);
        prop_assert!((c1 * c2 - c3).abs() <= 1e-11 * (1.0 + c3.abs()), "{} vs {}", c1 * c2, c3);
    }
}
