use num_bigint::BigInt;
use proptest::prelude::*;
use qfin::{ExponentVector, LaurentPolynomial, RationalValue};

fn poly(arity: usize) -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((prop::collection::vec(-4i64..=6, arity), -20i64..=20), 0..8).prop_map(move |terms| {
        LaurentPolynomial::from_terms(
            arity,
            terms
                .into_iter()
                .map(|(e, c)| (ExponentVector::new(&e).unwrap(), c)),
        )
        .unwrap()
    })
}

fn nonzero_rational() -> impl Strategy<Value = RationalValue> {
    (-9i64..=9, 1i64..=7)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| RationalValue::new(BigInt::from(n), BigInt::from(d)))
}

fn has_stored_zero(p: &LaurentPolynomial) -> bool {
    p.terms().any(|(_, c)| *c == BigInt::from(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, LaurentPolynomial::zero(2));
        prop_assert_eq!(&a * &LaurentPolynomial::one(2), a.clone());
    }

    #[test]
    fn canonical_form_has_no_zeros(a in poly(3), b in poly(3)) {
        for p in [&a + &b, &a - &b, &a * &b, &a - &a] {
            prop_assert!(!has_stored_zero(&p));
        }
    }

    #[test]
    fn evaluate_is_a_homomorphism(a in poly(2), b in poly(2), z in nonzero_rational(), q in nonzero_rational()) {
        let pt = [z, q];
        let ea = a.evaluate(&pt).unwrap();
        let eb = b.evaluate(&pt).unwrap();
        prop_assert_eq!((&a * &b).evaluate(&pt).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).evaluate(&pt).unwrap(), ea + eb);
    }

    #[test]
    fn invert_z_is_an_involution(a in poly(2)) {
        prop_assert_eq!(a.invert_z().invert_z(), a.clone());
    }

    #[test]
    fn substitute_is_a_homomorphism(a in poly(2), b in poly(2), k in 1i64..=4) {
        let s = |p: &LaurentPolynomial| p.substitute_q_power(k).unwrap();
        prop_assert_eq!(s(&(&a * &b)), &s(&a) * &s(&b));
        prop_assert_eq!(s(&(&a + &b)), &s(&a) + &s(&b));
    }

    #[test]
    fn collapse_is_a_homomorphism(a in poly(3), b in poly(3), n in -3i64..=8) {
        let c = |p: &LaurentPolynomial| p.collapse_q_power(n).unwrap();
        prop_assert_eq!(c(&(&a * &b)), &c(&a) * &c(&b));
    }

    #[test]
    fn term_list_and_json_round_trip(a in poly(2), b in poly(3)) {
        prop_assert_eq!(LaurentPolynomial::from_term_list(2, &a.to_term_list()).unwrap(), a.clone());
        // arity is inferred from the entry width, so only nonzero values keep arity 3
        let json = serde_json::to_string(&b).unwrap();
        let back: LaurentPolynomial = serde_json::from_str(&json).unwrap();
        if b.is_zero() {
            prop_assert_eq!(back, LaurentPolynomial::zero(2));
        } else {
            prop_assert_eq!(back, b);
        }
    }

    #[test]
    fn text_is_deterministic(a in poly(2)) {
        let shuffled = LaurentPolynomial::from_terms(2, a.terms().rev().map(|(e, c)| (*e, c.clone()))).unwrap();
        prop_assert_eq!(a.to_string(), shuffled.to_string());
    }

    #[test]
    fn truncation_respects_valuation(a in poly(2), order in -4i64..=6) {
        let t = a.truncate_q(order);
        prop_assert!(t.terms().all(|(e, _)| e.q() <= order));
        prop_assert!((&a - &t).terms().all(|(e, _)| e.q() > order));
    }
}

#[test]
fn mismatched_arity_is_an_error() {
    let a = LaurentPolynomial::one(2);
    let b = LaurentPolynomial::one(3);
    assert!(a.checked_add(&b).is_err());
    assert!(a.checked_mul(&b).is_err());
}
