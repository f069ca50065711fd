//! Cross-checks of the fast side builders against literal summation over
//! (optionally widened) index ranges, plus structural properties of the
//! sequences.

use qfin::identities::{
    arrf3_sides, epsilon_poly, lhs_poly, recurrence_spec, rhs_main_poly, run_recurrence, verify_identity,
    IdentityId, SideBuilder,
};
use qfin::qcomb::{andrews_z_binomial, gaussian_binomial, gaussian_binomial_star, trinomial_t0};
use qfin::{ExponentVector, LaurentPolynomial, QBinomialArgs};

const R1: IdentityId = IdentityId::R1Finite;
const R1P: IdentityId = IdentityId::R1PartnerFinite;
const R2: IdentityId = IdentityId::R2Finite;

fn gb(a: i64, b: i64, k: u32) -> LaurentPolynomial {
    gaussian_binomial(QBinomialArgs::new(a, b, k))
}

fn gb_star(a: i64, b: i64, k: u32) -> LaurentPolynomial {
    gaussian_binomial_star(QBinomialArgs::new(a, b, k))
}

/// `(-1)^sign_exp z^z q^q · Π factors`, or zero early if a factor is zero.
fn term(sign_exp: i64, z: i64, q: i64, factors: &[LaurentPolynomial]) -> LaurentPolynomial {
    let mut acc = LaurentPolynomial::zq(z, q, if sign_exp.rem_euclid(2) == 0 { 1 } else { -1 });
    for f in factors {
        if f.is_zero() {
            return LaurentPolynomial::zero(2);
        }
        acc = &acc * f;
    }
    acc
}

/// Widens `lo..=hi` to `lo-pad..=hi+pad` when `wide` is set.
fn span(lo: i64, hi: i64, wide: bool) -> std::ops::RangeInclusive<i64> {
    if wide {
        lo - 3..=2 * hi + 3
    } else {
        lo..=hi
    }
}

fn lhs_direct(id: IdentityId, n: i64, wide: bool) -> LaurentPolynomial {
    let mut acc = LaurentPolynomial::zero(2);
    match id {
        IdentityId::R1Finite => {
            for j in span(0, n / 2, wide) {
                for h in span(0, j, wide) {
                    for i in span(0, j, wide) {
                        let f = [gb(j, h, 2), gb(j, i, 2), gb(j + (n - h - i).div_euclid(2), 2 * j, 2)];
                        acc = &acc + &term(h + i, h - i, h * h + i * i + 2 * j * j, &f);
                    }
                }
            }
        }
        IdentityId::R1PartnerFinite => {
            for j in span(0, n / 2, wide) {
                for h in span(0, j, wide) {
                    for i in span(0, j + 1, wide) {
                        let f = [gb(j, h, 1), gb(j + 1, i, 1), gb(j + 1 + (n - h - i).div_euclid(2), 2 * j + 1, 1)];
                        let e = h * (h - 1) / 2 + i * (i + 1) / 2 + j * (j + 1);
                        acc = &acc + &term(h + i, h - i, e, &f);
                    }
                }
            }
        }
        IdentityId::R2Finite => {
            for j in span(0, n, wide) {
                for h in span(0, j, wide) {
                    for i in span(0, j, wide) {
                        if gb(j, h, 2).is_zero() || gb(j, i, 2).is_zero() {
                            continue;
                        }
                        for l in span(0, n - h - i, wide) {
                            let f = [gb(j, h, 2), gb(j, i, 2), gb_star(j + l - 1, l, 2), gb(n - h - i + j - l, 2 * j, 1)];
                            acc = &acc + &term(h + i + l, h - i, h * h + i * i + j * j + 2 * l, &f);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    acc
}

fn rhs_direct(id: IdentityId, n: i64, wide: bool) -> LaurentPolynomial {
    let window = if wide { 3 * n + 9 } else { n + 2 };
    let mut acc = LaurentPolynomial::zero(2);
    for j in -window..=window {
        let t = match id {
            IdentityId::R1Finite => {
                let main = term(j, j, 3 * j * j, &[gb(n - 1, (n + 3 * j - 1).div_euclid(2), 2)]);
                let eps = if n % 2 == 0 {
                    term(0, 2 * j, 12 * j * j + 6 * j + n, &[gb_star(n - 1, (n + 6 * j) / 2, 2)])
                } else {
                    term(1, 2 * j - 1, 12 * j * j - 6 * j + n, &[gb_star(n - 1, (n + 6 * j - 3) / 2, 2)])
                };
                &main + &eps
            }
            IdentityId::R1PartnerFinite => {
                let main = term(j, j, j * (3 * j + 1) / 2, &[gb(n, (n + 3 * j + 2).div_euclid(2), 1)]);
                let eps = if n % 2 == 0 {
                    term(0, 2 * j, 6 * j * j - 2 * j + n / 2, &[gb(n, n / 2 + 3 * j, 1)])
                } else {
                    term(1, 2 * j + 1, 6 * j * j + 4 * j + (n + 1) / 2, &[gb(n, (n + 6 * j + 3) / 2, 1)])
                };
                &main + &eps
            }
            IdentityId::R2Finite => {
                let t0 = &trinomial_t0(n, 2 * j) + &trinomial_t0(n - 1, 2 * j);
                term(j, j, 2 * j * j, &[t0])
            }
            _ => unreachable!(),
        };
        acc = &acc + &t;
    }
    acc
}

#[test]
fn builders_match_literal_summation() {
    for id in IdentityId::FINITE {
        let mut b = SideBuilder::new(id).unwrap();
        for n in 0..=8u32 {
            let lhs = b.lhs(n);
            let rhs = b.rhs(n);
            assert_eq!(lhs, lhs_direct(id, n as i64, false), "{id} lhs n={n}");
            assert_eq!(rhs, rhs_direct(id, n as i64, false), "{id} rhs n={n}");
            assert_eq!(lhs, rhs, "{id} n={n}");
        }
    }
}

#[test]
fn widening_ranges_changes_nothing() {
    for id in IdentityId::FINITE {
        let top = if id == R2 { 7 } else { 10 };
        for n in 0..=top {
            assert_eq!(lhs_direct(id, n, true), lhs_poly(id, n as u32).unwrap(), "{id} lhs n={n}");
            assert_eq!(rhs_direct(id, n, true), rhs_direct(id, n, false), "{id} rhs n={n}");
        }
    }
}

#[test]
fn z_symmetry_and_constant_term() {
    for id in IdentityId::FINITE {
        let seq = SideBuilder::new(id).unwrap().lhs_sequence(40);
        for (n, p) in seq.iter().enumerate() {
            let constant = LaurentPolynomial::from_terms(
                2,
                p.terms().filter(|(e, _)| e.q() == 0).map(|(e, c)| (*e, c.clone())),
            )
            .unwrap();
            assert!(constant.is_one(), "{id} n={n}: q^0 part {constant}");
            assert!(p.q_valuation().finite() == Some(0));
            if id != R1P {
                assert_eq!(p.invert_z(), *p, "{id} n={n}");
            }
        }
    }
    let p1 = lhs_poly(R1P, 1).unwrap();
    assert_ne!(p1.invert_z(), p1);
}

#[test]
fn recurrence_reproduces_lhs() {
    for id in IdentityId::FINITE {
        let spec = recurrence_spec(id).unwrap();
        let from_rec = run_recurrence(&spec, 40);
        let direct = SideBuilder::new(id).unwrap().lhs_sequence(40);
        for n in 0..=40 {
            assert_eq!(from_rec[n], direct[n], "{id} n={n}");
        }
        let o = spec.order;
        assert_eq!(run_recurrence(&spec, o - 1), spec.initial_conditions);
    }
}

/// The R1 left side as a case split on the parity of `n = 2m` / `2m+1`:
/// `Σ_k z^(2k) q^(12k²) [2m, m+3k]_{q²} - z^(-2k-1) q^(12k²+12k+3) [B, C]_{q²}`
/// with `[B, C] = [2m-1, m+3k+1]` for even `n` and `[2m+1, m+3k+2]` for odd `n`.
fn r1_case_split(n: i64) -> LaurentPolynomial {
    let m = n / 2;
    let mut acc = LaurentPolynomial::zero(2);
    for k in -(n + 2)..=(n + 2) {
        acc = &acc + &term(0, 2 * k, 12 * k * k, &[gb(2 * m, m + 3 * k, 2)]);
        let tail = if n % 2 == 0 { gb(2 * m - 1, m + 3 * k + 1, 2) } else { gb(2 * m + 1, m + 3 * k + 2, 2) };
        acc = &acc + &term(1, -2 * k - 1, 12 * k * k + 12 * k + 3, &[tail]);
    }
    acc
}

#[test]
fn r1_case_split_form_agrees() {
    let mut b = SideBuilder::new(R1).unwrap();
    for n in 1..=40 {
        assert_eq!(r1_case_split(n), b.lhs(n as u32), "n={n}");
    }
}

#[test]
fn epsilon_parity_shapes() {
    // even n: only even z-exponents; odd n: only odd ones
    for n in 0..=20u32 {
        for id in [R1, R1P] {
            let e = epsilon_poly(id, n).unwrap();
            assert!(e.terms().all(|(x, _)| x.z().rem_euclid(2) == (n % 2) as i64), "{id} n={n}");
        }
        assert!(epsilon_poly(R2, n).unwrap().is_zero());
    }
    assert!(rhs_main_poly(R1, 0).unwrap().is_zero());
}

fn arrf3_direct(n: i64) -> (LaurentPolynomial, LaurentPolynomial) {
    let mut lhs = LaurentPolynomial::zero(2);
    for j in 0..=n {
        lhs = &lhs + &term(0, j, j * j, &[andrews_z_binomial(n, j, 0, 1)]);
    }
    let mut rhs = LaurentPolynomial::zero(2);
    for j in 0..=n {
        if 2 * j <= n {
            let f = [andrews_z_binomial(n, j, 0, 1), andrews_z_binomial(2 * n + 1 - 2 * j, n - 2 * j, 1, j)];
            rhs = &rhs + &term(j, 2 * j, j * (5 * j - 1) / 2, &f);
        }
        if 2 * j < n {
            let f = [andrews_z_binomial(n, j, 0, 1), andrews_z_binomial(2 * n - 2 * j, n - 2 * j - 1, 1, j)];
            rhs = &rhs + &term(j + 1, 2 * j + 1, j * (5 * j + 3) / 2, &f);
        }
    }
    (lhs, rhs)
}

#[test]
fn arrf3_matches_literal_summation() {
    for n in 0..=8 {
        let (l, r) = arrf3_sides(n as u32);
        let (dl, dr) = arrf3_direct(n);
        assert_eq!(l, dl, "lhs n={n}");
        assert_eq!(r, dr, "rhs n={n}");
        assert_eq!(l, r, "n={n}");
    }
}

#[test]
fn report_serializes() {
    let r = verify_identity(R1, 4).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["identity"], "R1_FINITE");
    assert_eq!(json["status"], "pass");
    assert!(json["first_failure"].is_null());
    assert_eq!(json["n_checked"], serde_json::json!([0, 4]));
}

#[test]
fn unsupported_identities_are_errors() {
    assert!(lhs_poly(IdentityId::Arrf3, 1).is_err());
    assert!(recurrence_spec(IdentityId::Arrf1).is_err());
    assert!(SideBuilder::new(IdentityId::Arrf2).is_err());
    let _ = ExponentVector::zq(0, 0);
}
