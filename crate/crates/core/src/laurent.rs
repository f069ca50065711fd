//! Sparse multivariate Laurent polynomials over arbitrary-precision integers.
//!
//! Variables are positional: component 0 is `z`, component 1 is `q`, and
//! component 2 (when present) is `Q`, a stand-in for `q^n` used by
//! recurrence coefficients. Every polynomial has a fixed arity between 1
//! and 3 and stores only nonzero coefficients, so structural equality is
//! mathematical equality.
//!
//! The canonical term order (used by iteration, serialization and display)
//! is ascending `q`-exponent, then ascending `z`-exponent, then ascending
//! `Q`-exponent.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 3;

/// Index of the `z` component.
pub const Z: usize = 0;
/// Index of the `q` component.
pub const Q: usize = 1;
/// Index of the `Q = q^n` component.
pub const QN: usize = 2;

const VAR_NAMES: [&str; MAX_ARITY] = ["z", "q", "Q"];

/// Exact rational used for evaluation. Always reduced with a positive
/// denominator.
pub type RationalValue = BigRational;

/// Exponents of one monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVector {
    arity: u8,
    comps: [i64; MAX_ARITY],
}

impl ExponentVector {
    pub fn new(components: &[i64]) -> Result<Self> {
        let arity = components.len();
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::InvalidArity(arity));
        }
        let mut comps = [0; MAX_ARITY];
        comps[..arity].copy_from_slice(components);
        Ok(Self {
            arity: arity as u8,
            comps,
        })
    }

    pub fn zero(arity: usize) -> Result<Self> {
        if arity > MAX_ARITY {
            return Err(Error::InvalidArity(arity));
        }
        Self::new(&[0; MAX_ARITY][..arity])
    }

    /// Monomial `z^z q^q`.
    pub const fn zq(z: i64, q: i64) -> Self {
        Self {
            arity: 2,
            comps: [z, q, 0],
        }
    }

    /// Monomial `z^z q^q Q^big_q`.
    pub const fn zqn(z: i64, q: i64, big_q: i64) -> Self {
        Self {
            arity: 3,
            comps: [z, q, big_q],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn components(&self) -> &[i64] {
        &self.comps[..self.arity()]
    }

    pub fn get(&self, index: usize) -> i64 {
        self.components()[index]
    }

    pub fn z(&self) -> i64 {
        self.comps[Z]
    }

    /// The `q` component; zero for arity-1 vectors.
    pub fn q(&self) -> i64 {
        self.comps[Q]
    }

    fn plus(&self, other: &Self) -> Self {
        let mut comps = self.comps;
        for (c, o) in comps.iter_mut().zip(other.comps) {
            *c += o;
        }
        Self {
            arity: self.arity,
            comps,
        }
    }

    fn sort_key(&self) -> (u8, [i64; MAX_ARITY]) {
        if self.arity >= 2 {
            (self.arity, [self.comps[Q], self.comps[Z], self.comps[QN]])
        } else {
            (self.arity, self.comps)
        }
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `q`-adic valuation; the zero polynomial has valuation `Infinite`, which
/// compares greater than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPolynomial {
    arity: usize,
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity), "invalid arity {arity}");
        Self {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigInt::one())
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(arity);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(ExponentVector::zero(arity).unwrap(), c);
        }
        p
    }

    pub fn monomial(exps: ExponentVector, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(exps.arity());
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// `c z^z q^q` in arity 2.
    pub fn zq(z: i64, q: i64, c: impl Into<BigInt>) -> Self {
        Self::monomial(ExponentVector::zq(z, q), c)
    }

    /// Sums the given terms, dropping anything that cancels.
    pub fn from_terms<I, C>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            if e.arity() != arity {
                return Err(Error::ArityMismatch {
                    left: arity,
                    right: e.arity(),
                });
            }
            p.add_term(e, c.into());
        }
        Ok(p)
    }

    pub(crate) fn from_sorted_unchecked(arity: usize, terms: BTreeMap<ExponentVector, BigInt>) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Self { arity, terms }
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| c.is_one() && e.components().iter().all(|&x| x == 0))
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &BigInt)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.arity));
        }
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: HashMap<ExponentVector, BigInt> = HashMap::with_capacity(large.len() * 2);
        for (es, cs) in &small.terms {
            for (el, cl) in &large.terms {
                *acc.entry(es.plus(el)).or_default() += cs * cl;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self::from_sorted_unchecked(self.arity, terms))
    }

    /// Adds `c * m * other` into `self` in place.
    pub fn add_scaled_assign(&mut self, other: &Self, m: &ExponentVector, c: &BigInt) -> Result<()> {
        self.check_arity(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (e, x) in &other.terms {
            self.add_term(e.plus(m), x * c);
        }
        Ok(())
    }

    /// Shifts every exponent by `m` and multiplies every coefficient by `c`.
    pub fn monomial_scale(&self, m: &ExponentVector, c: &BigInt) -> Self {
        assert_eq!(m.arity(), self.arity, "monomial arity must match polynomial arity");
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.plus(m), x * c)).collect();
        Self::from_sorted_unchecked(self.arity, terms)
    }

    /// Realizes `q -> q^k`.
    pub fn substitute_q_power(&self, k: i64) -> Result<Self> {
        self.require_arity("substitute_q_power", 2)?;
        if k <= 0 {
            return Err(Error::NonPositivePower(k));
        }
        Ok(self.map_exponents(|e| {
            let mut e = *e;
            e.comps[Q] *= k;
            e
        }))
    }

    /// Realizes `z -> 1/z`.
    pub fn invert_z(&self) -> Self {
        self.map_exponents(|e| {
            let mut e = *e;
            e.comps[Z] = -e.comps[Z];
            e
        })
    }

    /// Realizes `z -> q^shift`, so `z = 1` is `shift = 0` and `z = q` is
    /// `shift = 1`. The result keeps the arity, with every `z`-exponent 0.
    pub fn specialize_z(&self, shift: i64) -> Result<Self> {
        self.require_arity("specialize_z", 2)?;
        Ok(self.map_exponents(|e| {
            let mut e = *e;
            e.comps[Q] += shift * e.comps[Z];
            e.comps[Z] = 0;
            e
        }))
    }

    /// Collapses an arity-3 polynomial in `(z, q, Q)` to arity 2 by
    /// substituting `Q = q^n`.
    pub fn collapse_q_power(&self, n: i64) -> Result<Self> {
        if self.arity != 3 {
            return Err(Error::ArityMismatch {
                left: 3,
                right: self.arity,
            });
        }
        let mut out = Self::zero(2);
        for (e, c) in &self.terms {
            out.add_term(ExponentVector::zq(e.comps[Z], e.comps[Q] + n * e.comps[QN]), c.clone());
        }
        Ok(out)
    }

    /// Embeds an arity-2 polynomial into arity 3 with `Q`-exponent 0.
    pub fn lift_to_arity3(&self) -> Result<Self> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch {
                left: 2,
                right: self.arity,
            });
        }
        Ok(self.map_exponents_to(3, |e| ExponentVector::zqn(e.z(), e.q(), 0)))
    }

    fn map_exponents(&self, f: impl Fn(&ExponentVector) -> ExponentVector) -> Self {
        self.map_exponents_to(self.arity, f)
    }

    fn map_exponents_to(&self, arity: usize, f: impl Fn(&ExponentVector) -> ExponentVector) -> Self {
        let mut out = Self::zero(arity);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    fn require_arity(&self, op: &'static str, needed: usize) -> Result<()> {
        if self.arity < needed {
            return Err(Error::ArityTooSmall {
                op,
                needed,
                got: self.arity,
            });
        }
        Ok(())
    }

    /// Exact value at `point`, one coordinate per variable.
    pub fn evaluate(&self, point: &[RationalValue]) -> Result<RationalValue> {
        if point.len() != self.arity {
            return Err(Error::PointArity {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut powers: Vec<HashMap<i64, RationalValue>> = vec![HashMap::new(); self.arity];
        let mut total = RationalValue::zero();
        for (e, c) in &self.terms {
            let mut term = RationalValue::from_integer(c.clone());
            for (index, &k) in e.components().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let x = &point[index];
                if x.is_zero() {
                    if k < 0 {
                        return Err(Error::ZeroCoordinate { index });
                    }
                    term = RationalValue::zero();
                    break;
                }
                let p = powers[index]
                    .entry(k)
                    .or_insert_with(|| Pow::pow(x.clone(), k as i32));
                term *= &*p;
            }
            total += term;
        }
        Ok(total)
    }

    /// Minimum `q`-exponent.
    pub fn q_valuation(&self) -> Valuation {
        // canonical order is q-major for arity >= 2
        match self.terms.keys().next() {
            Some(e) if self.arity >= 2 => Valuation::Finite(e.q()),
            Some(_) => Valuation::Finite(0),
            None => Valuation::Infinite,
        }
    }

    /// Maximum `q`-exponent, `None` for zero.
    pub fn q_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().map(|e| e.q())
    }

    /// Drops every term whose `q`-exponent exceeds `order`.
    pub fn truncate_q(&self, order: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .take_while(|(e, _)| e.q() <= order)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        Self::from_sorted_unchecked(self.arity, terms)
    }

    /// Range of `z`-exponents present, `None` for zero.
    pub fn z_range(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|e| e.z());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), z| (lo.min(z), hi.max(z))))
    }

    /// Term list `[[e_0, .., e_{arity-1}, "coeff"], ..]` in canonical order.
    pub fn to_term_list(&self) -> Vec<(Vec<i64>, String)> {
        self.terms
            .iter()
            .map(|(e, c)| (e.components().to_vec(), c.to_string()))
            .collect()
    }

    pub fn from_term_list(arity: usize, list: &[(Vec<i64>, String)]) -> Result<Self> {
        let mut terms = Vec::with_capacity(list.len());
        for (exps, c) in list {
            if exps.len() != arity {
                return Err(Error::Malformed(format!(
                    "term has {} exponents, expected {arity}",
                    exps.len()
                )));
            }
            let c: BigInt = c
                .parse()
                .map_err(|_| Error::Malformed(format!("bad coefficient `{c}`")))?;
            terms.push((ExponentVector::new(exps)?, c));
        }
        Self::from_terms(arity, terms)
    }
}

fn binop(a: &LaurentPolynomial, b: &LaurentPolynomial, r: Result<LaurentPolynomial>) -> LaurentPolynomial {
    r.unwrap_or_else(|_| panic!("arity mismatch: {} vs {}", a.arity, b.arity))
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        binop(self, rhs, self.checked_add(rhs))
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        binop(self, rhs, self.checked_sub(rhs))
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        binop(self, rhs, self.checked_mul(rhs))
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        let terms = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        LaurentPolynomial::from_sorted_unchecked(self.arity, terms)
    }
}

impl Add for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        &self + &rhs
    }
}

impl Sub for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        &self - &rhs
    }
}

impl Mul for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        &self * &rhs
    }
}

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

/// Renders `|c| * vars` for one monomial. Variable order inside a monomial
/// is `z`, `Q`, then `q`, so a grouped display reads `(..)*q^e`.
fn monomial_text(c_abs: &BigInt, exps: &[(usize, i64)]) -> String {
    let factors: Vec<String> = exps
        .iter()
        .filter(|(_, k)| *k != 0)
        .map(|&(v, k)| {
            if k == 1 {
                VAR_NAMES[v].to_string()
            } else {
                format!("{}^{}", VAR_NAMES[v], k)
            }
        })
        .collect();
    if factors.is_empty() {
        c_abs.to_string()
    } else if c_abs.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", c_abs, factors.join("*"))
    }
}

fn push_signed(out: &mut String, negative: bool, body: &str) {
    match (out.is_empty(), negative) {
        (true, false) => {}
        (true, true) => out.push('-'),
        (false, false) => out.push_str(" + "),
        (false, true) => out.push_str(" - "),
    }
    out.push_str(body);
}

fn inner_vars(e: &ExponentVector) -> Vec<(usize, i64)> {
    let mut v = vec![(Z, e.z())];
    if e.arity() == 3 {
        v.push((QN, e.comps[QN]));
    }
    v
}

/// Canonical text: terms grouped by ascending `q`-exponent; inside a group
/// the cofactor in the remaining variables is listed by descending `z`
/// (then `Q`) exponent and parenthesized when it has several terms, with a
/// leading minus sign pulled out, e.g. `1 + q^2 - (z + z^-1)*q^3`.
impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        if self.arity == 1 {
            for (e, c) in &self.terms {
                push_signed(&mut out, c.is_negative(), &monomial_text(&c.abs(), &[(Z, e.z())]));
            }
            return f.write_str(&out);
        }
        let mut groups: BTreeMap<i64, Vec<(&ExponentVector, &BigInt)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            groups.entry(e.q()).or_default().push((e, c));
        }
        for (qe, mut group) in groups {
            group.sort_by(|a, b| inner_vars(b.0).cmp(&inner_vars(a.0)));
            if group.len() == 1 {
                let (e, c) = group[0];
                let mut vars = inner_vars(e);
                vars.push((Q, qe));
                push_signed(&mut out, c.is_negative(), &monomial_text(&c.abs(), &vars));
                continue;
            }
            let flip = group[0].1.is_negative();
            let mut inner = String::new();
            for (e, c) in &group {
                let negative = c.is_negative() != flip;
                push_signed(&mut inner, negative, &monomial_text(&c.abs(), &inner_vars(e)));
            }
            let body = if qe == 0 {
                format!("({inner})")
            } else {
                format!("({inner})*{}", monomial_text(&BigInt::one(), &[(Q, qe)]))
            };
            push_signed(&mut out, flip, &body);
        }
        f.write_str(&out)
    }
}

// ---------------------------------------------------------------------------
// Term-list serialization: [[z_exp, q_exp, "coeff"], ...]
// ---------------------------------------------------------------------------

struct TermRef<'a>(&'a ExponentVector, &'a BigInt);

impl Serialize for TermRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(self.0.arity() + 1)?;
        for x in self.0.components() {
            t.serialize_element(x)?;
        }
        t.serialize_element(&self.1.to_string())?;
        t.end()
    }
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&TermRef(e, c))?;
        }
        seq.end()
    }
}

/// Deserializes a term list; the arity is inferred from the entry width
/// (an empty list yields the arity-2 zero polynomial).
impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct TermsVisitor;

        impl<'de> Visitor<'de> for TermsVisitor {
            type Value = LaurentPolynomial;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a list of [exponents.., \"coefficient\"] entries")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
                let mut list = Vec::new();
                while let Some(entry) = seq.next_element::<Vec<serde_json::Value>>()? {
                    let (coeff, exps) = entry
                        .split_last()
                        .ok_or_else(|| de::Error::custom("empty term entry"))?;
                    let coeff = coeff
                        .as_str()
                        .ok_or_else(|| de::Error::custom("coefficient must be a decimal string"))?
                        .to_string();
                    let exps = exps
                        .iter()
                        .map(|v| v.as_i64().ok_or_else(|| de::Error::custom("exponent must be an integer")))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    list.push((exps, coeff));
                }
                let arity = list.first().map_or(2, |(e, _)| e.len());
                LaurentPolynomial::from_term_list(arity, &list).map_err(de::Error::custom)
            }
        }

        d.deserialize_seq(TermsVisitor)
    }
}
