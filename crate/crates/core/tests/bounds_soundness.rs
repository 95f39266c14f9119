use hyposel::bounds::{
    as_eps, as_warmup, b_cs, calibrate_constant, exact_binomial_tail, hoeffding_tail,
    sample_size_bs, t_as_empirical, t_as_worst, t_cs_avg, threshold_b, BVariant, Side,
};
use proptest::prelude::*;

/// Binomial pmf from the product form of C(t, k), summed directly.
fn oracle_tail(p: f64, eps: f64, t: u64, side: Side) -> f64 {
    let ln_pmf = |k: u64| -> f64 {
        let mut ln_c = 0.0;
        for i in 0..k {
            ln_c += ((t - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        ln_c + k as f64 * p.ln() + (t - k) as f64 * (1.0 - p).ln()
    };
    let tf = t as f64;
    (0..=t)
        .filter(|&k| {
            // Integer comparison: k*1e6 against scaled bounds avoids float noise
            // on grid points like p*t + eps*t = 60.
            let k = k as f64;
            let shift = ((p + eps) * tf * 1e6).round();
            let down = ((p - eps) * tf * 1e6).round();
            match side {
                Side::Upper => k * 1e6 > shift,
                Side::Lower => k * 1e6 < down,
            }
        })
        .map(|k| ln_pmf(k).exp())
        .sum()
}

fn steps(from: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| ((from + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

#[test]
fn exact_tail_matches_product_oracle() {
    for p in steps(0.1, 0.1, 9) {
        for eps in [0.02, 0.05, 0.1, 0.25] {
            for t in [1u64, 7, 10, 50, 100, 333] {
                for side in [Side::Upper, Side::Lower] {
                    let got = exact_binomial_tail(p, eps, t, side).unwrap();
                    let want = oracle_tail(p, eps, t, side);
                    let tol = 1e-12 + 1e-9 * want;
                    assert!(
                        (got - want).abs() <= tol,
                        "p={p} eps={eps} t={t} {side:?}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn exact_tail_spec_points() {
    assert_eq!(exact_binomial_tail(0.5, 0.5, 10, Side::Upper).unwrap(), 0.0);
    let up = exact_binomial_tail(0.5, 0.1, 100, Side::Upper).unwrap();
    let lo = exact_binomial_tail(0.5, 0.1, 100, Side::Lower).unwrap();
    assert!((up - oracle_tail(0.5, 0.1, 100, Side::Upper)).abs() < 1e-15);
    assert!((up - lo).abs() < 1e-15);
}

#[test]
fn hoeffding_dominates_exact_tail_on_exhaustive_grid() {
    let mut checked = 0;
    for p in steps(0.1, 0.1, 9) {
        for eps in steps(0.05, 0.05, 10) {
            for t in (10..=500).step_by(10) {
                let bound = hoeffding_tail(eps, t, 2.0).unwrap();
                for side in [Side::Upper, Side::Lower] {
                    let tail = exact_binomial_tail(p, eps, t, side).unwrap();
                    assert!(
                        tail <= bound,
                        "p={p} eps={eps} t={t} {side:?}: {tail} > {bound}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 9 * 10 * 50 * 2);
}

#[test]
fn single_point_calibration() {
    assert_eq!(
        calibrate_constant(&[0.5], &[0.1], &[100], 0.25).unwrap(),
        4.0
    );
    assert_eq!(
        calibrate_constant(&[0.5], &[1.0], &[100], 0.25).unwrap(),
        16.0
    );
}

#[test]
fn calibration_at_least_base_constant() {
    let c = calibrate_constant(
        &steps(0.1, 0.1, 9),
        &steps(0.05, 0.05, 10),
        &[10, 100, 500],
        0.25,
    )
    .unwrap();
    assert!(c >= 2.0);
}

#[test]
fn sample_sizes_near_reported_values() {
    for (gamma, c, reported) in [(0.1, 2.0, 6550i64), (0.1, 4.0, 3275), (0.05, 4.0, 13101)] {
        let m = sample_size_bs(18, 0.01, gamma, c).unwrap() as i64;
        assert!((m - reported).abs() <= 2, "{m} vs {reported}");
    }
}

#[test]
fn closed_form_values() {
    let close = |a: f64, b: f64, tol: f64| assert!((a - b).abs() <= tol, "{a} vs {b}");
    close(
        b_cs(18, 0.01, 0.1, 4.0, BVariant::Simple).unwrap(),
        16.0 * 3600f64.ln() / 0.04,
        1e-9,
    );
    let full_arg =
        32.0 * std::f64::consts::E * 18.0 / (4.0 * (std::f64::consts::E - 1.0) * 0.01 * 0.01);
    close(
        b_cs(18, 0.01, 0.1, 4.0, BVariant::Full).unwrap(),
        400.0 * full_arg.ln(),
        1e-9,
    );
    close(
        threshold_b(18, 0.01, 0.1, 4.0, BVariant::Simple).unwrap(),
        12.0 * 3600f64.ln() / 0.4,
        1e-9,
    );
    close(
        threshold_b(18, 0.01, 0.05, 4.0, BVariant::Simple).unwrap(),
        491.3,
        0.05,
    );
    close(t_cs_avg(18, 0.01, 0.05, 0.2, 4.0).unwrap(), 2456.6, 0.05);
    close(
        t_as_worst(18, 0.01, 0.2, 4.0).unwrap(),
        64.0 * 5400f64.ln() / 0.16,
        1e-9,
    );
    close(t_as_empirical(18, 0.01, 0.2, 4.0).unwrap(), 1217.0, 0.5);
    close(t_as_empirical(18, 0.01, 0.1, 4.0).unwrap(), 4868.0, 0.5);
    assert_eq!(as_warmup(18, 0.01, 4.0).unwrap(), 215);
    assert_eq!(as_warmup(18, 0.01, 2.0).unwrap(), 430);
}

proptest! {
    #[test]
    fn bounds_monotone(
        n in 1usize..200,
        delta in 0.001f64..0.5,
        gamma in 0.02f64..0.5,
        c in 1.0f64..16.0,
    ) {
        let bs = |n, d, g, c| sample_size_bs(n, d, g, c).unwrap();
        let b = |n, d, g, c| threshold_b(n, d, g, c, BVariant::Simple).unwrap();
        let tcs = |n, d, g, c| t_cs_avg(n, d, g, g, c).unwrap();
        let tas = |n, d, g, c| t_as_worst(n, d, g, c).unwrap();
        prop_assert!(bs(n, delta, gamma, c * 1.5) <= bs(n, delta, gamma, c));
        prop_assert!(bs(n, delta, gamma * 1.5, c) <= bs(n, delta, gamma, c));
        prop_assert!(bs(n + 10, delta, gamma, c) >= bs(n, delta, gamma, c));
        prop_assert!(bs(n, delta / 2.0, gamma, c) >= bs(n, delta, gamma, c));
        for f in [b, tcs, tas] {
            let base = f(n, delta, gamma, c);
            prop_assert!(f(n, delta, gamma, c * 1.01) < base);
            prop_assert!(f(n, delta, gamma * 1.01, c) < base);
            prop_assert!(f(n + 1, delta, gamma, c) > base);
            prop_assert!(f(n, delta * 0.99, gamma, c) > base);
        }
    }

    #[test]
    fn cs_average_depends_on_product(g1 in 0.01f64..0.5, g2 in 0.01f64..0.5) {
        let (lo, hi) = (g1.min(g2), g1.max(g2));
        let mid = (lo * hi).sqrt();
        let a = t_cs_avg(18, 0.01, lo, hi, 4.0).unwrap();
        let b = t_cs_avg(18, 0.01, mid, mid, 4.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn empirical_to_worst_ratio(n in 1usize..100, delta in 0.001f64..0.5, g in 0.01f64..0.5, c in 1.0f64..8.0) {
        let r = t_as_empirical(n, delta, g, c).unwrap() / t_as_worst(n, delta, g, c).unwrap();
        prop_assert!((r - 2.38f64.powi(2) / 16.0).abs() < 1e-12);
    }

    #[test]
    fn warmup_is_where_eps_reaches_one_fifth(n in 1usize..100, delta in 0.001f64..0.5, c in 1.0f64..16.0) {
        let w = as_warmup(n, delta, c).unwrap();
        prop_assert!(as_eps(n, delta, c, w).unwrap() <= 0.2 + 1e-12);
        if w > 1 {
            prop_assert!(as_eps(n, delta, c, w - 1).unwrap() > 0.2);
        }
    }

    #[test]
    fn tail_nonincreasing_in_eps_and_t(p in 0.05f64..0.95, eps in 0.01f64..0.4, t in 1u64..400) {
        for side in [Side::Upper, Side::Lower] {
            let base = exact_binomial_tail(p, eps, t, side).unwrap();
            prop_assert!(exact_binomial_tail(p, eps + 0.05, t, side).unwrap() <= base + 1e-15);
        }
        // Deviation probability at a fixed eps shrinks with t along multiples
        // that keep the offset integral.
        let a = exact_binomial_tail(0.5, 0.1, 10 * (t / 10 + 1), Side::Upper).unwrap();
        let b = exact_binomial_tail(0.5, 0.1, 10 * (t / 10 + 2), Side::Upper).unwrap();
        prop_assert!(b <= a);
    }
}

#[test]
fn full_variant_dominates_on_experiment_grid() {
    for gamma in [0.02, 0.05, 0.1, 0.2, 0.3] {
        for delta in [0.01, 0.05, 0.2] {
            for c in [2.0, 4.0, 8.0] {
                let full = b_cs(18, delta, gamma, c, BVariant::Full).unwrap();
                let simple = b_cs(18, delta, gamma, c, BVariant::Simple).unwrap();
                assert!(full >= simple, "gamma={gamma} delta={delta} c={c}");
            }
        }
    }
}
