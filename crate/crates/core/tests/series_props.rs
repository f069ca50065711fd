use proptest::prelude::*;
use qfin::identities::{IdentityId, SideBuilder};
use qfin::series::{
    invert_series, jtp_check, product_side, product_truncated, stabilization_valuations, ProductFactor,
    TruncatedSeries,
};
use qfin::{ExponentVector, LaurentPolynomial, Valuation};

/// Coefficients of `Π factors` in `q` alone (all `z`-exponents 0), by
/// plain integer convolution: `(factor q-exponent, step, sign)`.
fn brute_product(factors: &[(usize, usize, i128)], n: usize) -> Vec<i128> {
    let mut c = vec![0i128; n + 1];
    c[0] = 1;
    for &(start, step, sign) in factors {
        let mut e = start;
        while e <= n {
            for k in (e..=n).rev() {
                c[k] -= sign * c[k - e];
            }
            e += step;
        }
    }
    c
}

/// Inverse of a power series with constant term 1, by long division.
fn brute_inverse(s: &[i128]) -> Vec<i128> {
    let mut t = vec![0i128; s.len()];
    t[0] = 1;
    for k in 1..s.len() {
        t[k] = -(1..=k).map(|i| s[i] * t[k - i]).sum::<i128>();
    }
    t
}

fn to_series(c: &[i128]) -> TruncatedSeries {
    let p = LaurentPolynomial::from_terms(
        2,
        c.iter()
            .enumerate()
            .map(|(k, v)| (ExponentVector::zq(0, k as i64), num_bigint::BigInt::from(*v))),
    )
    .unwrap();
    TruncatedSeries::new(&p, c.len() as u32 - 1).unwrap()
}

#[test]
fn euler_product_is_pentagonal() {
    let n = 60;
    let mut pentagonal = vec![0i128; n + 1];
    for k in -10i64..=10 {
        let e = (k * (3 * k - 1) / 2) as usize;
        if e <= n {
            pentagonal[e] += if k % 2 == 0 { 1 } else { -1 };
        }
    }
    assert_eq!(product_truncated(&[ProductFactor::new(0, 1, 1)], n as u32).unwrap(), to_series(&pentagonal));
}

#[test]
fn r1_product_side_at_z_one() {
    for n in 0..=30usize {
        // (q³;q⁶)² (q⁶;q⁶) / (q²;q²)
        let num = brute_product(&[(3, 6, 1), (3, 6, 1), (6, 6, 1)], n);
        let den = brute_inverse(&brute_product(&[(2, 2, 1)], n));
        let mut want = vec![0i128; n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                want[i + j] += num[i] * den[j];
            }
        }
        let got = product_side(IdentityId::R1Finite, n as u32).unwrap().specialize_z(0);
        assert!(got.body().terms().all(|(e, _)| e.z() == 0));
        assert_eq!(got, to_series(&want), "order {n}");
    }
}

#[test]
fn r2_sign_flag_factor() {
    // (-q; q²)_∞ counts partitions into distinct odd parts
    let n = 25;
    let got = product_truncated(&[ProductFactor::negated(0, 1, 2)], n as u32).unwrap();
    assert_eq!(got, to_series(&brute_product(&[(1, 2, -1)], n)));
}

#[test]
fn jtp_both_families_at_30() {
    for id in IdentityId::FINITE {
        assert!(jtp_check(id, 30).unwrap(), "{id}");
    }
}

#[test]
fn sequences_stabilize() {
    for id in IdentityId::FINITE {
        let seq = SideBuilder::new(id).unwrap().lhs_sequence(40);
        let vals = stabilization_valuations(&seq);
        for (m, v) in vals.iter().enumerate().skip(1) {
            assert!(*v >= Valuation::Finite(1), "{id}: P_{} - P_{m} has valuation {v}", m + 1);
        }
        assert!(vals[39] > Valuation::Finite(10), "{id}: {}", vals[39]);
    }
}

fn unit_series() -> impl Strategy<Value = TruncatedSeries> {
    (prop::collection::vec((-2i64..=2, 1i64..=10, -5i64..=5), 0..10), 0u32..=10).prop_map(|(terms, order)| {
        let mut t: Vec<(ExponentVector, i64)> = terms.into_iter().map(|(z, q, c)| (ExponentVector::zq(z, q), c)).collect();
        t.push((ExponentVector::zq(0, 0), 1));
        TruncatedSeries::new(&LaurentPolynomial::from_terms(2, t).unwrap(), order).unwrap()
    })
}

proptest! {
    #[test]
    fn inverse_is_a_true_inverse(s in unit_series()) {
        let t = invert_series(&s).unwrap();
        prop_assert_eq!(s.mul(&t), TruncatedSeries::one(s.order()));
        prop_assert_eq!(invert_series(&t).unwrap(), s);
    }
}
