use glscov::clt_diag::{y_sequence, z_sequence, CltProfile, ProfileSource};
use glscov::cov_bounds::{davydov_bound, factorization_check, gls_strong_bound};
use glscov::fundamental::{fundamental, fundamental_truncated};
use glscov::psi::{dual_psi, product_zeta, MomentTable, PsiFunction};
use glscov::tails::{conjugate, tail_bound};
use proptest::prelude::*;

fn unbounded() -> impl Strategy<Value = PsiFunction> {
    (0.3f64..6.0).prop_map(|m| PsiFunction::power(m).unwrap())
}

fn bounded() -> impl Strategy<Value = PsiFunction> {
    prop_oneof![
        (1.5f64..8.0, 0.0f64..3.0).prop_map(|(b, beta)| PsiFunction::finite_support(b, beta).unwrap()),
        (1.5f64..10.0).prop_map(|r| PsiFunction::extremal(r).unwrap()),
    ]
}

fn tabulated() -> impl Strategy<Value = PsiFunction> {
    prop::collection::vec((0.05f64..1.0, 0.0f64..0.5), 2..8).prop_map(|steps| {
        let (mut p, mut v) = (1.0, 1.0);
        let points = steps
            .into_iter()
            .map(|(dp, dv)| {
                let pt = [p, v];
                p += dp;
                v += dv;
                pt
            })
            .collect();
        PsiFunction::tabulated(points).unwrap()
    })
}

fn any_psi() -> impl Strategy<Value = PsiFunction> {
    prop_oneof![
        unbounded(),
        bounded(),
        tabulated(),
        unbounded().prop_map(|p| dual_psi(&p).unwrap()),
        (unbounded(), bounded()).prop_map(|(a, b)| product_zeta(&a, &b)),
    ]
}

const GRID: [f64; 9] = [1.0, 1.1, 1.5, 2.0, 2.5, 3.7, 6.0, 20.0, 1e4];

proptest! {
    #[test]
    fn json_round_trip_is_pointwise_exact(psi in any_psi()) {
        let back = PsiFunction::from_json(&psi.to_json()).unwrap();
        for p in GRID {
            let (a, b) = (psi.value(p), back.value(p));
            prop_assert!(a == b || (a.is_nan() && b.is_nan()), "p = {}: {} vs {}", p, a, b);
        }
    }

    #[test]
    fn dual_is_an_involution(psi in unbounded(), p in 1.01f64..200.0) {
        let dd = dual_psi(&dual_psi(&psi).unwrap()).unwrap();
        let (a, b) = (psi.value(p), dd.value(p));
        prop_assert!(((a - b) / a).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn sample_moments_are_monotone(xs in prop::collection::vec(-50.0f64..50.0, 1..60)) {
        prop_assume!(xs.iter().any(|x| *x != 0.0));
        let grid: Vec<f64> = (0..30).map(|i| 1.0 + i as f64 * 0.7).collect();
        let t = MomentTable::from_samples(&xs, &grid, None).unwrap();
        for w in t.entries().windows(2) {
            prop_assert!(w[1].1 >= w[0].1 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn conjugate_is_convex(psi in prop_oneof![unbounded(), bounded()], x1 in 0.0f64..4.0, d1 in 0.01f64..2.0, d2 in 0.01f64..2.0) {
        let (x2, x3) = (x1 + d1, x1 + d1 + d2);
        let v = |x: f64| conjugate(&psi, x).unwrap().value;
        let t = d1 / (d1 + d2);
        let chord = (1.0 - t) * v(x1) + t * v(x3);
        prop_assert!(v(x2) <= chord + 1e-8 * (1.0 + chord.abs()), "{} > {}", v(x2), chord);
    }

    #[test]
    fn fundamental_nonincreasing_in_truncation(psi in prop_oneof![unbounded(), bounded()], delta in 1e-12f64..0.9, s1 in 1.0f64..1.4, ds in 0.0f64..0.4) {
        let s2 = s1 + ds;
        prop_assume!(psi.support().contains(s2));
        let a = fundamental_truncated(&psi, s1, delta).unwrap();
        let b = fundamental_truncated(&psi, s2, delta).unwrap();
        prop_assert!(b.value <= a.value * (1.0 + 1e-10));
        prop_assert!(a.value > 0.0);
        prop_assert!(b.argmax_p >= s2 * (1.0 - 1e-12));
        let full = fundamental(&psi, delta).unwrap();
        prop_assert!(a.value <= full.value * (1.0 + 1e-10));
    }

    #[test]
    fn tail_bound_is_a_nonincreasing_probability(psi in prop_oneof![unbounded(), bounded()], y in 2.72f64..50.0, dy in 0.0f64..20.0) {
        let a = tail_bound(&psi, 1.0, y).unwrap();
        let b = tail_bound(&psi, 1.0, y + dy).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a * (1.0 + 1e-9) + 1e-300);
    }

    #[test]
    fn davydov_monotone_in_alpha(a in 0.0f64..0.25, da in 0.0f64..0.25, p in 2.1f64..20.0, q in 2.1f64..20.0) {
        let x = davydov_bound(a, p, q, 1.0, 1.0).unwrap().value;
        let y = davydov_bound((a + da).min(1.0), p, q, 1.0, 1.0).unwrap().value;
        prop_assert!(x <= y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorization_is_one_sided(psi in prop_oneof![unbounded(), bounded()], nu in prop_oneof![unbounded(), bounded()], la in 0.5f64..20.0, lb in 0.5f64..20.0) {
        let r = factorization_check(&psi, &nu, (-la).exp(), (-lb).exp()).unwrap();
        prop_assert!(r.lhs <= r.rhs * (1.0 + 1e-9), "{} > {}", r.lhs, r.rhs);
    }

    #[test]
    fn clt_sequences_match_bounds(m in 0.5f64..4.0, betas in prop::collection::vec(prop_oneof![Just(0.0), 1e-9f64..1.0], 2..10)) {
        let psi = PsiFunction::power(m).unwrap();
        let alphas: Vec<f64> = betas.iter().map(|b| b / 4.0).collect();
        let profile = CltProfile::new(alphas.clone(), betas.clone(), psi.clone(), ProfileSource::User).unwrap();
        let y = y_sequence(&profile).unwrap();
        let z = z_sequence(&profile).unwrap();
        for k in 1..betas.len() {
            prop_assert!(y[k - 1] >= 0.0 && z[k - 1] >= 0.0);
            prop_assert_eq!(y[k - 1] == 0.0, alphas[k] == 0.0);
            prop_assert_eq!(z[k - 1] == 0.0, betas[k] == 0.0);
            if betas[k] > 0.0 {
                let s = gls_strong_bound(&psi, &psi, betas[k], 1.0, 1.0).unwrap().value / 2.0;
                prop_assert!(((z[k - 1] - s) / s).abs() < 1e-9, "{} vs {}", z[k - 1], s);
            }
        }
    }
}
