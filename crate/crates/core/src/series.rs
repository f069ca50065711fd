//! Truncated power series in `q` with Laurent-polynomial coefficients in
//! `z`: infinite products, inversion, the Jacobi triple product and the
//! `n → ∞` limit checks for the finite identities.
//!
//! A [`TruncatedSeries`] of order `N` is a residue class modulo `q^(N+1)`:
//! its body never holds a term with `q`-exponent above `N`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::identities::{IdentityId, SideBuilder};
use crate::laurent::{ExponentVector, LaurentPolynomial, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    body: LaurentPolynomial,
    order: u32,
}

impl TruncatedSeries {
    /// Truncates `body` (arity 2) to `order`.
    pub fn new(body: &LaurentPolynomial, order: u32) -> Result<Self> {
        if body.arity() != 2 {
            return Err(Error::ArityMismatch { left: 2, right: body.arity() });
        }
        Ok(Self {
            body: body.truncate_q(order as i64),
            order,
        })
    }

    pub fn one(order: u32) -> Self {
        Self {
            body: LaurentPolynomial::one(2),
            order,
        }
    }

    pub fn body(&self) -> &LaurentPolynomial {
        &self.body
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Product, truncated to the smaller of the two orders.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<ExponentVector, BigInt> = BTreeMap::new();
        for (ea, ca) in self.body.terms() {
            for (eb, cb) in other.body.terms() {
                if ea.q() + eb.q() > order as i64 {
                    // terms are q-sorted, nothing further in `other` fits
                    break;
                }
                *acc.entry(ExponentVector::zq(ea.z() + eb.z(), ea.q() + eb.q())).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        TruncatedSeries {
            body: LaurentPolynomial::from_sorted_unchecked(2, acc),
            order,
        }
    }

    /// `z -> q^shift`; the order is kept, terms pushed beyond it dropped.
    pub fn specialize_z(&self, shift: i64) -> TruncatedSeries {
        let body = self.body.specialize_z(shift).expect("arity 2");
        TruncatedSeries {
            body: body.truncate_q(self.order as i64),
            order: self.order,
        }
    }

    /// The coefficient of `q^k` as a Laurent polynomial in `z` (arity 2,
    /// all `q`-exponents 0).
    fn slice(&self, k: i64) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(
            2,
            self.body
                .terms()
                .filter(|(e, _)| e.q() == k)
                .map(|(e, c)| (ExponentVector::zq(e.z(), 0), c.clone())),
        )
        .expect("arity 2")
    }
}

/// One infinite-product factor `(sign·z^z_exp q^q_exp; q^step)_∞`, i.e.
/// `Π_{i>=0} (1 - sign·z^z_exp q^(q_exp + step·i))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductFactor {
    pub z_exp: i64,
    pub q_exp: i64,
    pub step: u32,
    /// `+1` or `-1`; `-1` gives factors such as `(-q; q²)_∞`.
    pub sign: i8,
}

impl ProductFactor {
    pub const fn new(z_exp: i64, q_exp: i64, step: u32) -> Self {
        Self {
            z_exp,
            q_exp,
            step,
            sign: 1,
        }
    }

    pub const fn negated(z_exp: i64, q_exp: i64, step: u32) -> Self {
        Self {
            z_exp,
            q_exp,
            step,
            sign: -1,
        }
    }
}

/// The product of `factors`, truncated at `order`.
pub fn product_truncated(factors: &[ProductFactor], order: u32) -> Result<TruncatedSeries> {
    for f in factors {
        if f.q_exp <= 0 {
            return Err(Error::NonPositiveFactor(f.q_exp));
        }
        if f.step == 0 || (f.sign != 1 && f.sign != -1) {
            return Err(Error::Degenerate(format!("bad product factor {f:?}")));
        }
    }
    let n = order as i64;
    let mut body = LaurentPolynomial::one(2);
    for f in factors {
        let mut e = f.q_exp;
        while e <= n {
            // body *= (1 - sign·z^a q^e)
            let coeff = BigInt::from(-(f.sign as i64));
            let shifted = body.monomial_scale(&ExponentVector::zq(f.z_exp, e), &coeff).truncate_q(n);
            body = &body + &shifted;
            e += f.step as i64;
        }
    }
    TruncatedSeries::new(&body, order)
}

/// Multiplicative inverse; the `q^0` coefficient must be exactly `1` and
/// no negative `q`-exponents may occur.
pub fn invert_series(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    match s.body.q_valuation() {
        Valuation::Finite(v) if v >= 0 => {}
        _ => return Err(Error::NotInvertible),
    }
    if !s.slice(0).is_one() {
        return Err(Error::NotInvertible);
    }
    let n = s.order as i64;
    let slices: Vec<LaurentPolynomial> = (0..=n).map(|k| s.slice(k)).collect();
    // t_0 = 1, t_k = -Σ_{i=1}^{k} s_i t_{k-i}
    let mut t: Vec<LaurentPolynomial> = vec![LaurentPolynomial::one(2)];
    for k in 1..=n as usize {
        let mut acc = LaurentPolynomial::zero(2);
        for i in 1..=k {
            if !slices[i].is_zero() && !t[k - i].is_zero() {
                acc = &acc - &(&slices[i] * &t[k - i]);
            }
        }
        t.push(acc);
    }
    let mut terms = Vec::new();
    for (k, tk) in t.iter().enumerate() {
        for (e, c) in tk.terms() {
            terms.push((ExponentVector::zq(e.z(), k as i64), c.clone()));
        }
    }
    TruncatedSeries::new(&LaurentPolynomial::from_terms(2, terms)?, s.order)
}

fn require_finite(id: IdentityId, op: &'static str) -> Result<()> {
    if id.is_finite_identity() {
        Ok(())
    } else {
        Err(Error::Unsupported { op, id })
    }
}

/// Triple-product numerator `(z q^a, q^b / z, q^(a+b); q^(a+b))_∞` of each
/// identity's product side.
fn triple_product_factors(id: IdentityId) -> [ProductFactor; 3] {
    let (a, b) = match id {
        IdentityId::R1Finite => (3, 3),
        IdentityId::R1PartnerFinite => (2, 1),
        _ => (2, 2),
    };
    let step = (a + b) as u32;
    [
        ProductFactor::new(1, a, step),
        ProductFactor::new(-1, b, step),
        ProductFactor::new(0, a + b, step),
    ]
}

/// The infinite-product side of the `n → ∞` limit:
///
/// * R1: `(zq³, q³/z, q⁶; q⁶)_∞ / (q²; q²)_∞`
/// * R1 partner: `(zq², q/z, q³; q³)_∞ / (q; q)_∞`
/// * R2: `(zq², q²/z, q⁴; q⁴)_∞ (-q; q²)_∞ / (q²; q²)_∞`
pub fn product_side(id: IdentityId, order: u32) -> Result<TruncatedSeries> {
    require_finite(id, "product_side")?;
    let mut numerator = triple_product_factors(id).to_vec();
    let denominator = match id {
        IdentityId::R1PartnerFinite => ProductFactor::new(0, 1, 1),
        _ => ProductFactor::new(0, 2, 2),
    };
    if id == IdentityId::R2Finite {
        numerator.push(ProductFactor::negated(0, 1, 2));
    }
    let num = product_truncated(&numerator, order)?;
    let den = invert_series(&product_truncated(&[denominator], order)?)?;
    Ok(num.mul(&den))
}

/// `q`-exponent of the `j`-th theta term for each identity.
fn theta_exponent(id: IdentityId, j: i64) -> i64 {
    match id {
        IdentityId::R1Finite => 3 * j * j,
        IdentityId::R1PartnerFinite => j * (3 * j + 1) / 2,
        _ => 2 * j * j,
    }
}

/// `Σ_j (-1)^j z^j q^e(j)` over all `j` with `e(j) <= order`, where `e(j)`
/// is `3j²` (R1), `j(3j+1)/2` (R1 partner) or `2j²` (R2).
pub fn theta_truncated(id: IdentityId, order: u32) -> Result<TruncatedSeries> {
    require_finite(id, "theta_truncated")?;
    let n = order as i64;
    let mut terms = Vec::new();
    // every exponent is at least |j|, so |j| <= order suffices
    for j in -n..=n {
        let e = theta_exponent(id, j);
        if e <= n {
            terms.push((ExponentVector::zq(j, e), if j % 2 == 0 { 1 } else { -1 }));
        }
    }
    TruncatedSeries::new(&LaurentPolynomial::from_terms(2, terms)?, order)
}

/// Jacobi triple product: the theta sum equals its product form.
pub fn jtp_check(id: IdentityId, order: u32) -> Result<bool> {
    Ok(theta_truncated(id, order)? == product_truncated(&triple_product_factors(id), order)?)
}

/// `q_valuation(P_{m+1} - P_m)` for consecutive terms of `seq`.
pub fn stabilization_valuations(seq: &[LaurentPolynomial]) -> Vec<Valuation> {
    seq.windows(2).map(|w| (&w[1] - &w[0]).q_valuation()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitOutcome {
    /// `P_n` agrees with the product side through `q^order`.
    Pass { order: u32 },
    /// Disagreement below the claimed order; `difference` is
    /// `P_n - product` truncated there.
    Fail { order: u32, difference: LaurentPolynomial },
    /// Stabilization too weak for the requested margin.
    Inconclusive { stabilization: Valuation, margin: u32 },
}

impl LimitOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, LimitOutcome::Pass { .. })
    }
}

/// Measures `M = min_{m ∈ n-3..n-1} q_valuation(P_{m+1} - P_m)` and checks
/// `P_n ≡ product_side` through `q^(M - margin)`.
pub fn limit_check(id: IdentityId, n: u32, margin: u32) -> Result<LimitOutcome> {
    require_finite(id, "limit_check")?;
    if n < 4 {
        return Err(Error::InvalidRange(format!("limit check needs n >= 4, got {n}")));
    }
    let seq = SideBuilder::new(id)?.lhs_sequence(n);
    limit_check_sequence(id, &seq, margin)
}

/// [`limit_check`] on a precomputed `P_0..P_n`.
pub fn limit_check_sequence(id: IdentityId, seq: &[LaurentPolynomial], margin: u32) -> Result<LimitOutcome> {
    require_finite(id, "limit_check")?;
    let n = seq.len().checked_sub(1).unwrap_or(0);
    if n < 4 {
        return Err(Error::SequenceTooShort { needed: 4, have: seq.len() });
    }
    let stabilization = stabilization_valuations(&seq[n - 3..=n]).into_iter().min().expect("three windows");
    let inconclusive = LimitOutcome::Inconclusive { stabilization, margin };
    let order = match stabilization {
        Valuation::Finite(m) if m - margin as i64 >= 0 => (m - margin as i64) as u32,
        _ => return Ok(inconclusive),
    };
    let lhs = TruncatedSeries::new(&seq[n], order)?;
    let rhs = product_side(id, order)?;
    if lhs == rhs {
        Ok(LimitOutcome::Pass { order })
    } else {
        Ok(LimitOutcome::Fail {
            order,
            difference: &lhs.body - &rhs.body,
        })
    }
}

/// `Σ_j z^j q^(j²) / (q; q)_j`, truncated at `order`.
pub fn rogers_ramanujan_sum(order: u32) -> Result<TruncatedSeries> {
    let mut acc = LaurentPolynomial::zero(2);
    let mut j: i64 = 0;
    while j * j <= order as i64 {
        let den: Vec<ProductFactor> = (1..=j).map(|i| ProductFactor::new(0, i, u32::MAX)).collect();
        let inv = invert_series(&product_truncated(&den, order)?)?;
        acc = &acc + &inv.body.monomial_scale(&ExponentVector::zq(j, j * j), &BigInt::from(1));
        j += 1;
    }
    TruncatedSeries::new(&acc, order)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RogersRamanujanCheck {
    /// `Σ q^(j²)/(q;q)_j = 1/((q;q⁵)_∞ (q⁴;q⁵)_∞)`.
    pub at_z_one: bool,
    /// `Σ q^(j²+j)/(q;q)_j = 1/((q²;q⁵)_∞ (q³;q⁵)_∞)`.
    pub at_z_q: bool,
}

impl RogersRamanujanCheck {
    pub fn passed(&self) -> bool {
        self.at_z_one && self.at_z_q
    }
}

/// Specializes [`rogers_ramanujan_sum`] at `z = 1` and `z = q` and compares
/// with the classical Rogers–Ramanujan products.
pub fn rogers_ramanujan_check(order: u32) -> Result<RogersRamanujanCheck> {
    let sum = rogers_ramanujan_sum(order)?;
    let product = |a: i64, b: i64| -> Result<TruncatedSeries> {
        invert_series(&product_truncated(&[ProductFactor::new(0, a, 5), ProductFactor::new(0, b, 5)], order)?)
    };
    Ok(RogersRamanujanCheck {
        at_z_one: sum.specialize_z(0) == product(1, 4)?,
        at_z_q: sum.specialize_z(1) == product(2, 3)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zq(terms: &[(i64, i64, i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(2, terms.iter().map(|&(z, q, c)| (ExponentVector::zq(z, q), c))).unwrap()
    }

    fn series(terms: &[(i64, i64, i64)], order: u32) -> TruncatedSeries {
        TruncatedSeries::new(&zq(terms), order).unwrap()
    }

    #[test]
    fn product_examples() {
        let euler = product_truncated(&[ProductFactor::new(0, 1, 1)], 5).unwrap();
        assert_eq!(euler, series(&[(0, 0, 1), (0, 1, -1), (0, 2, -1), (0, 5, 1)], 5));
        assert_eq!(product_truncated(&[], 7).unwrap(), TruncatedSeries::one(7));
        assert_eq!(product_truncated(&[ProductFactor::new(1, 3, 6)], 2).unwrap(), TruncatedSeries::one(2));
        assert_eq!(
            product_truncated(&[ProductFactor::new(0, 0, 1)], 3),
            Err(Error::NonPositiveFactor(0))
        );
    }

    #[test]
    fn invert_examples() {
        let p = product_truncated(&[ProductFactor::new(0, 2, 2)], 6).unwrap();
        assert_eq!(invert_series(&p).unwrap(), series(&[(0, 0, 1), (0, 2, 1), (0, 4, 2), (0, 6, 3)], 6));
        assert_eq!(invert_series(&TruncatedSeries::one(4)).unwrap(), TruncatedSeries::one(4));
        let geo = invert_series(&series(&[(0, 0, 1), (0, 1, -1)], 3)).unwrap();
        assert_eq!(geo, series(&[(0, 0, 1), (0, 1, 1), (0, 2, 1), (0, 3, 1)], 3));
        assert_eq!(invert_series(&series(&[(0, 0, 2)], 3)), Err(Error::NotInvertible));
        assert_eq!(invert_series(&series(&[(1, 0, 1)], 3)), Err(Error::NotInvertible));
    }

    #[test]
    fn product_side_examples() {
        assert_eq!(product_side(IdentityId::R1Finite, 2).unwrap(), series(&[(0, 0, 1), (0, 2, 1)], 2));
        assert_eq!(product_side(IdentityId::R1Finite, 0).unwrap(), TruncatedSeries::one(0));
        assert_eq!(product_side(IdentityId::R2Finite, 1).unwrap(), series(&[(0, 0, 1), (0, 1, 1)], 1));
        assert!(product_side(IdentityId::Arrf2, 3).is_err());
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_truncated(IdentityId::R1Finite, 2).unwrap(), TruncatedSeries::one(2));
        assert_eq!(
            theta_truncated(IdentityId::R1Finite, 3).unwrap(),
            series(&[(0, 0, 1), (1, 3, -1), (-1, 3, -1)], 3)
        );
        assert_eq!(
            theta_truncated(IdentityId::R1PartnerFinite, 2).unwrap(),
            series(&[(0, 0, 1), (1, 2, -1), (-1, 1, -1)], 2)
        );
    }

    #[test]
    fn jtp_small() {
        for id in IdentityId::FINITE {
            assert!(jtp_check(id, 0).unwrap());
            assert!(jtp_check(id, 12).unwrap());
        }
    }

    #[test]
    fn limit_small() {
        for id in IdentityId::FINITE {
            let out = limit_check(id, 12, 0).unwrap();
            assert!(out.passed(), "{id}: {out:?}");
        }
        assert!(limit_check(IdentityId::R1Finite, 3, 0).is_err());
        let out = limit_check(IdentityId::R1PartnerFinite, 6, 50).unwrap();
        assert!(matches!(out, LimitOutcome::Inconclusive { margin: 50, .. }));
    }

    #[test]
    fn rogers_ramanujan_small() {
        assert!(rogers_ramanujan_check(15).unwrap().passed());
    }
}
