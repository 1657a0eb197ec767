//! Operator-level invariants checked on random degrees, points and schemes.

use bernstein_ops::corpus::{by_name, monomial, standard_corpus};
use bernstein_ops::moduli::{omega1, omega2};
use bernstein_ops::verify::{durrmeyer_central_moment, sigma_genuine, uniform_grid};
use bernstein_ops::{CoefficientScheme, Family, OperatorId, Operators, TheoremId, Verifier};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn corpus_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["e0", "e1", "e2", "e3", "e4", "exp", "sin_pi", "abs_half", "xlogx"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_operator_reproduces_constants(n in 2u32..60, x in 0.0f64..=1.0, a1 in -3.0f64..3.0) {
        let ops = Operators::new();
        let s = CoefficientScheme::constant(a1);
        for op in OperatorId::all() {
            let scheme = (op.variant() == bernstein_ops::Variant::M1).then_some(&s);
            let v = ops.apply(op, &monomial(0), n, x, scheme).unwrap();
            prop_assert!((v - 1.0).abs() <= 1e-12 * (1.0 + a1.abs()), "{op}: {v}");
        }
    }

    #[test]
    fn a1_minus_one_reduces_to_classical(fam in family(), name in corpus_name(), n in 2u32..40, x in 0.0f64..=1.0) {
        let ops = Operators::new();
        let f = by_name(name).unwrap();
        let m1 = ops.apply(OperatorId::m1(fam), &f, n, x, Some(&CoefficientScheme::classic())).unwrap();
        let classic = ops.apply(OperatorId::classic(fam), &f, n, x, None).unwrap();
        prop_assert!((m1 - classic).abs() <= 1e-12);
    }

    #[test]
    fn m1_tilts_along_the_classical_derivative(
        fam in family(),
        name in prop::sample::select(vec!["e2", "e3", "exp", "sin_pi", "abs_half"]),
        n in 2u32..40,
        x in 0.0f64..=1.0,
        a1 in -2.0f64..2.0,
    ) {
        // L^{M1}_n f - L_n f = (1 + a1)(1/2 - x)(L_n f)'(x) / n
        let ops = Operators::new();
        let f = by_name(name).unwrap();
        let s = CoefficientScheme::constant(a1);
        let lhs = ops.apply(OperatorId::m1(fam), &f, n, x, Some(&s)).unwrap()
            - ops.apply(OperatorId::classic(fam), &f, n, x, None).unwrap();
        let d = ops.operator_derivative(OperatorId::classic(fam), &f, n, x).unwrap();
        let rhs = (1.0 + a1) * (0.5 - x) * d / f64::from(n);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + d.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn bernstein_voronovskaya_is_exact_on_e2(n in 1u32..2000, x in 0.0f64..=1.0) {
        let ops = Operators::new();
        let b = ops.apply(OperatorId::classic(Family::Bernstein), &monomial(2), n, x, None).unwrap();
        let scaled = f64::from(n) * (b - x * x) - x * (1.0 - x);
        prop_assert!(scaled.abs() <= 1e-12, "{scaled}");
    }

    #[test]
    fn positive_operators_preserve_order(fam in family(), n in 2u32..40, x in 0.0f64..=1.0) {
        // e2 <= e1 on [0, 1], so L e2 <= L e1
        let ops = Operators::new();
        let op = OperatorId::classic(fam);
        let a = ops.apply(op, &monomial(2), n, x, None).unwrap();
        let b = ops.apply(op, &monomial(1), n, x, None).unwrap();
        prop_assert!(a <= b + 1e-14);
    }

    #[test]
    fn moduli_are_monotone_and_ordered(name in corpus_name(), delta in 1e-4f64..0.5) {
        let f = by_name(name).unwrap();
        let w1 = omega1(&f, delta, 512).unwrap().value;
        let w1_half = omega1(&f, delta / 2.0, 512).unwrap().value;
        let w2 = omega2(&f, delta, 512).unwrap().value;
        prop_assert!(w1_half <= w1 * (1.0 + 1e-12));
        prop_assert!(w2 <= 2.0 * w1 * (1.0 + 1e-12) + 1e-15);
        // ω1(f; 2δ) <= 2 ω1(f; δ)
        let w1_double = omega1(&f, 2.0 * delta, 512).unwrap().value;
        prop_assert!(w1_double <= 2.0 * w1 * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn genuine_sigma_stays_below_quarter_over_n(n in 2u32..5000, x in 0.0f64..=1.0) {
        prop_assert!(sigma_genuine(n, x) <= 0.25 / f64::from(n) * (1.0 + 1e-14));
    }

    #[test]
    fn odd_durrmeyer_moments_vanish_at_the_centre(n in 1u32..200) {
        prop_assert!(durrmeyer_central_moment(n, 1, 0.5).unwrap().abs() <= 1e-15);
        prop_assert!(durrmeyer_central_moment(n, 3, 0.5).unwrap().abs() <= 1e-15);
    }
}

#[test]
fn every_m1_check_matches_its_classical_counterpart_at_a1_minus_one() {
    let v = Verifier::default();
    let grid = uniform_grid(101);
    let s = CoefficientScheme::classic();
    for f in standard_corpus() {
        for n in [4u32, 8, 16, 32] {
            let pairs = [(TheoremId::VORON_D_M1, TheoremId::D_CLASSIC_VORON)];
            for (m1, classic) in pairs {
                let a = v.check(m1, &f, n, Some(&s), &grid).unwrap();
                let b = v.check(classic, &f, n, None, &grid).unwrap();
                for (x, y) in a.lhs.iter().zip(&b.lhs) {
                    assert!((x - y).abs() <= 1e-12, "{m1} vs {classic} on {} n={n}", f.name());
                }
            }
        }
    }
}
