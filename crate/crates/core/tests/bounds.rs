use mdlnet::bounds::{self, Problem};
use mdlnet::learn::family_sample_size;
use mdlnet::score::Penalty;
use proptest::prelude::*;

fn base(m: f64) -> Problem {
    Problem::new(2, 4, m, 2, Penalty::HalfLog).unwrap()
}

fn n_for(eps: f64, delta: f64, m: f64) -> u64 {
    bounds::sample_complexity(eps, delta, &base(m))
        .unwrap()
        .expect("feasible")
        .n_samples
}

#[test]
fn sample_complexity_result_satisfies_the_evaluator() {
    let prob = base(0.2);
    let sc = bounds::sample_complexity(0.1, 0.1, &prob).unwrap().unwrap();
    let rep = bounds::thm39_eval(sc.a, sc.b, sc.n_samples, &prob);
    assert!(rep.valid, "{:?}", rep.violated_conditions);
    assert!(rep.epsilon.unwrap() <= 0.1 && rep.delta <= 0.1);
    // one row fewer breaks the guarantee at the same (a, b)
    let below = bounds::thm39_eval(sc.a, sc.b, sc.n_samples - 1, &prob);
    assert!(!below.valid || below.delta > 0.1);
}

#[test]
fn sample_complexity_monotone_in_targets() {
    let n = n_for(0.1, 0.1, 0.2);
    assert!(n_for(0.05, 0.1, 0.2) >= n);
    assert!(n_for(0.2, 0.1, 0.2) <= n);
    assert!(n_for(0.1, 0.01, 0.2) >= n);
    assert!(n_for(0.1, 0.1, 0.15) >= n);
}

#[test]
fn tiny_skewness_is_infeasible() {
    assert_eq!(
        bounds::sample_complexity(0.1, 0.1, &base(0.001)).unwrap(),
        None
    );
}

#[test]
fn sample_complexity_tracks_reference_shape() {
    let (n0, r0) = (
        n_for(0.1, 0.1, 0.2) as f64,
        bounds::asymptotic_reference(0.1, 0.1, &base(0.2)).unwrap(),
    );
    for (eps, delta, m) in [(0.05, 0.1, 0.2), (0.1, 0.01, 0.2), (0.1, 0.1, 0.15)] {
        let ratio = n_for(eps, delta, m) as f64 / n0;
        let reference = bounds::asymptotic_reference(eps, delta, &base(m)).unwrap() / r0;
        let q = ratio / reference;
        assert!(
            (0.25..=4.0).contains(&q),
            "{eps} {delta} {m}: {ratio} vs {reference}"
        );
    }
}

#[test]
fn ideal_case_is_minimal() {
    for p in [
        Penalty::constant(1.0).unwrap(),
        Penalty::HalfLog,
        Penalty::polynomial(0.5).unwrap(),
    ] {
        for (g, eps) in [(2, 0.1), (5, 0.3), (11, 0.01)] {
            let n = bounds::ideal_case_n(g, eps, p).unwrap();
            let ok = |n: u64| {
                let psi = p.weight(n).unwrap();
                psi > 0.0 && n as f64 / psi > g as f64 / eps
            };
            assert!(ok(n) && !ok(n - 1), "{p} {g} {eps}: {n}");
        }
    }
}

#[test]
fn family_sample_size_matches_scan() {
    // independent scan of (N+1)^k * 2^(-N eps^2 / (3 log2(1/m))) <= delta
    let scan = |k: i32, m: f64, eps: f64, delta: f64| -> u64 {
        (1u64..)
            .find(|&n| {
                let nf = n as f64;
                k as f64 * (nf + 1.0).log2() - nf * eps * eps / (3.0 * (1.0 / m).log2())
                    <= delta.log2()
            })
            .unwrap()
    };
    for (k, m, eps, delta) in [
        (2, 0.5, 0.2, 0.1),
        (2, 0.25, 0.1, 0.01),
        (4, 0.2, 0.15, 0.05),
    ] {
        assert_eq!(
            family_sample_size(k as usize, m, eps, delta).unwrap(),
            scan(k, m, eps, delta)
        );
    }
    assert!(
        family_sample_size(2, 0.5, 0.1, 0.1).unwrap()
            > family_sample_size(2, 0.5, 0.2, 0.1).unwrap()
    );
    assert!(family_sample_size(2, 0.5, 0.25, 0.1).is_err());
}

#[test]
fn bounds_stay_finite_at_extremes() {
    for n in [1u64, 1_000, 1_000_000_000_000] {
        for card in [2u64, 1 << 20] {
            assert!(bounds::sanov_log2_bound(n, card, 0.3).is_finite());
            assert!(bounds::skew_log2_bound(n, card, 0.1).is_finite());
        }
    }
    assert_eq!(bounds::sanov_bound(1_000_000_000_000, 4, 0.5), 0.0);
}

proptest! {
    #[test]
    fn error_function_monotone(
        a in 1e-8f64..1e-2, b in 1e-12f64..1e-3, c in 0.1f64..50.0, m in 1e-3f64..1.0,
        k in 1.0f64..3.0,
    ) {
        if let Some(e) = bounds::lemma37_e(a, b, c, m) {
            for bigger in [
                bounds::lemma37_e(a * k, b, c, m),
                bounds::lemma37_e(a, b * k, c, m),
                bounds::lemma37_e(a, b, c * k, m),
            ]
            .into_iter()
            .flatten()
            {
                prop_assert!(bigger >= e);
            }
            let wider = bounds::lemma37_e(a, b, c, (m * k).min(1.0)).unwrap();
            prop_assert!(wider <= e);
        }
    }

    #[test]
    fn f_inverse_round_trip(y in 2.0f64..1e9) {
        let x = bounds::f_inverse(y).unwrap();
        prop_assert!(x >= 4.0);
        prop_assert!((x / x.log2() - y).abs() <= 1e-6 * y);
    }
}
