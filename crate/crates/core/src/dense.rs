//! Dense univariate Laurent polynomials in `q` and `z`-graded sums of them.
//!
//! These back the heavy multi-sums. Coefficients live in `i128` while a
//! bit-length bound proves every kernel result fits, and fall back to
//! `BigInt` otherwise, so results are always exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::laurent::{ExponentVector, LaurentPolynomial};

/// Headroom kept below `i128::MAX` by the fast kernels.
const SMALL_BITS: u32 = 125;

#[derive(Clone, Debug)]
enum Coeffs {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

/// Coefficient of `q^(low + i)` is entry `i`.
#[derive(Clone, Debug)]
pub(crate) struct QPoly {
    low: i64,
    coeffs: Coeffs,
}

fn bits_u128(x: u128) -> u32 {
    128 - x.leading_zeros()
}

fn max_bits(v: &[i128]) -> u32 {
    bits_u128(v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0))
}

fn to_big(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub(crate) static ZERO_QPOLY: QPoly = QPoly {
    low: 0,
    coeffs: Coeffs::Small(Vec::new()),
};

impl QPoly {
    pub fn zero() -> Self {
        Self {
            low: 0,
            coeffs: Coeffs::Small(Vec::new()),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(e: i64, c: i128) -> Self {
        if c == 0 {
            return Self::zero();
        }
        Self {
            low: e,
            coeffs: Coeffs::Small(vec![c]),
        }
    }

    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Small(v) => v.len(),
            Coeffs::Big(v) => v.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    #[cfg(test)]
    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.len() as i64 - 1
    }

    #[cfg(test)]
    pub fn coefficient(&self, e: i64) -> BigInt {
        let i = e - self.low;
        if i < 0 || i >= self.len() as i64 {
            return BigInt::zero();
        }
        match &self.coeffs {
            Coeffs::Small(v) => BigInt::from(v[i as usize]),
            Coeffs::Big(v) => v[i as usize].clone(),
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> Vec<(i64, BigInt)> {
        let mut out = Vec::new();
        match &self.coeffs {
            Coeffs::Small(v) => {
                for (i, &c) in v.iter().enumerate() {
                    if c != 0 {
                        out.push((self.low + i as i64, BigInt::from(c)));
                    }
                }
            }
            Coeffs::Big(v) => {
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        out.push((self.low + i as i64, c.clone()));
                    }
                }
            }
        }
        out
    }

    #[cfg(test)]
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            v[(e - lo) as usize] += c;
        }
        let mut p = Self {
            low: lo,
            coeffs: Coeffs::Big(v),
        };
        p.normalize();
        p
    }

    /// Trims zero ends and demotes to `i128` storage when possible.
    fn normalize(&mut self) {
        let (start, end) = match &self.coeffs {
            Coeffs::Small(v) => (
                v.iter().position(|&c| c != 0),
                v.iter().rposition(|&c| c != 0),
            ),
            Coeffs::Big(v) => (
                v.iter().position(|c| !c.is_zero()),
                v.iter().rposition(|c| !c.is_zero()),
            ),
        };
        let (Some(start), Some(end)) = (start, end) else {
            *self = Self::zero();
            return;
        };
        self.low += start as i64;
        match &mut self.coeffs {
            Coeffs::Small(v) => {
                v.truncate(end + 1);
                v.drain(..start);
            }
            Coeffs::Big(v) => {
                v.truncate(end + 1);
                v.drain(..start);
                let small: Option<Vec<i128>> = v
                    .iter()
                    .map(|c| c.to_i128().filter(|x| bits_u128(x.unsigned_abs()) <= SMALL_BITS))
                    .collect();
                if let Some(small) = small {
                    self.coeffs = Coeffs::Small(small);
                }
            }
        }
    }

    fn promote(&mut self) {
        if let Coeffs::Small(v) = &self.coeffs {
            self.coeffs = Coeffs::Big(to_big(v));
        }
    }

    fn big_view(&self) -> std::borrow::Cow<'_, [BigInt]> {
        match &self.coeffs {
            Coeffs::Small(v) => std::borrow::Cow::Owned(to_big(v)),
            Coeffs::Big(v) => std::borrow::Cow::Borrowed(v),
        }
    }

    /// Grows storage so exponents `lo..=hi` are addressable.
    fn cover(&mut self, lo: i64, hi: i64) {
        if self.is_zero() {
            self.low = lo;
        }
        let new_lo = lo.min(self.low);
        let new_hi = hi.max(self.high());
        let front = (self.low - new_lo) as usize;
        let len = (new_hi - new_lo + 1) as usize;
        match &mut self.coeffs {
            Coeffs::Small(v) => {
                if front > 0 {
                    v.splice(0..0, std::iter::repeat_n(0, front));
                }
                v.resize(len, 0);
            }
            Coeffs::Big(v) => {
                if front > 0 {
                    v.splice(0..0, std::iter::repeat_n(BigInt::zero(), front));
                }
                v.resize(len, BigInt::zero());
            }
        }
        self.low = new_lo;
    }

    /// `self += (-1)^negate * q^shift * other`.
    pub fn add_scaled(&mut self, other: &QPoly, shift: i64, negate: bool) {
        if other.is_zero() {
            return;
        }
        let lo = other.low + shift;
        self.cover(lo, other.high() + shift);
        let off = (lo - self.low) as usize;
        if let (Coeffs::Small(a), Coeffs::Small(b)) = (&self.coeffs, &other.coeffs) {
            if max_bits(a).max(max_bits(b)) >= SMALL_BITS {
                self.promote();
            }
        } else {
            self.promote();
        }
        match (&mut self.coeffs, &other.coeffs) {
            (Coeffs::Small(a), Coeffs::Small(b)) => {
                let dst = &mut a[off..off + b.len()];
                if negate {
                    dst.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
                } else {
                    dst.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                }
            }
            (Coeffs::Big(a), _) => {
                let b = other.big_view();
                let dst = &mut a[off..off + b.len()];
                if negate {
                    dst.iter_mut().zip(b.iter()).for_each(|(x, y)| *x -= y);
                } else {
                    dst.iter_mut().zip(b.iter()).for_each(|(x, y)| *x += y);
                }
            }
            (Coeffs::Small(_), Coeffs::Big(_)) => unreachable!("promoted above"),
        }
        self.normalize();
    }

    /// `q -> q^k`.
    pub fn substitute(&self, k: i64) -> Self {
        debug_assert!(k >= 1);
        if k == 1 || self.is_zero() {
            return self.clone();
        }
        let len = (self.len() - 1) * k as usize + 1;
        let coeffs = match &self.coeffs {
            Coeffs::Small(v) => {
                let mut out = vec![0i128; len];
                for (i, &c) in v.iter().enumerate() {
                    out[i * k as usize] = c;
                }
                Coeffs::Small(out)
            }
            Coeffs::Big(v) => {
                let mut out = vec![BigInt::zero(); len];
                for (i, c) in v.iter().enumerate() {
                    out[i * k as usize] = c.clone();
                }
                Coeffs::Big(out)
            }
        };
        Self {
            low: self.low * k,
            coeffs,
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let low = self.low + other.low;
        let len = self.len() + other.len() - 1;
        if let (Coeffs::Small(a), Coeffs::Small(b)) = (&self.coeffs, &other.coeffs) {
            let (ba, bb) = (max_bits(a), max_bits(b));
            let bl = bits_u128(a.len().min(b.len()) as u128);
            if ba + bb + bl <= SMALL_BITS {
                let out = if ba <= 63 && bb <= 63 {
                    mul_i64(a, b, len)
                } else {
                    mul_i128(a, b, len)
                };
                let mut p = Self {
                    low,
                    coeffs: Coeffs::Small(out),
                };
                p.normalize();
                return p;
            }
        }
        let a = self.big_view();
        let b = other.big_view();
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        let mut p = Self {
            low,
            coeffs: Coeffs::Big(out),
        };
        p.normalize();
        p
    }

    #[cfg(test)]
    pub fn eq_exact(&self, other: &QPoly) -> bool {
        self.low == other.low && self.big_view() == other.big_view()
    }

    /// As an arity-2 polynomial carrying `z^z`.
    pub fn to_laurent(&self, z: i64) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero(2);
        for (e, c) in self.terms() {
            out.add_term(ExponentVector::zq(z, e), c);
        }
        out
    }
}

fn mul_i64(a: &[i128], b: &[i128], len: usize) -> Vec<i128> {
    let a: Vec<i64> = a.iter().map(|&x| x as i64).collect();
    let b: Vec<i64> = b.iter().map(|&x| x as i64).collect();
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let x = x as i128;
        for (o, &y) in out[i..i + b.len()].iter_mut().zip(&b) {
            *o += x * y as i128;
        }
    }
    out
}

fn mul_i128(a: &[i128], b: &[i128], len: usize) -> Vec<i128> {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (o, &y) in out[i..i + b.len()].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// `Σ_d z^d · A_d(q)`, keyed by `z`-exponent.
#[derive(Clone, Debug, Default)]
pub(crate) struct ZqPoly {
    parts: BTreeMap<i64, QPoly>,
}

impl ZqPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> impl Iterator<Item = (i64, &QPoly)> {
        self.parts.iter().map(|(z, p)| (*z, p))
    }

    /// `self += (-1)^negate * z^z * q^shift * p`.
    pub fn add_part(&mut self, z: i64, p: &QPoly, shift: i64, negate: bool) {
        if p.is_zero() {
            return;
        }
        let slot = self.parts.entry(z).or_insert_with(QPoly::zero);
        slot.add_scaled(p, shift, negate);
        if slot.is_zero() {
            self.parts.remove(&z);
        }
    }

    /// `self += (-1)^negate * q^shift * other * k` for a pure-`q` factor `k`.
    pub fn add_product(&mut self, other: &ZqPoly, k: &QPoly, shift: i64, negate: bool) {
        for (z, p) in &other.parts {
            let prod = p.mul(k);
            self.add_part(*z, &prod, shift, negate);
        }
    }

    /// `self += (-1)^negate * z^z_shift * q^shift * other`.
    pub fn add_assign(&mut self, other: &ZqPoly, z_shift: i64, shift: i64, negate: bool) {
        for (z, p) in &other.parts {
            self.add_part(z + z_shift, p, shift, negate);
        }
    }

    pub fn mul(&self, other: &ZqPoly) -> ZqPoly {
        let mut out = ZqPoly::new();
        for (za, a) in &self.parts {
            for (zb, b) in &other.parts {
                out.add_part(za + zb, &a.mul(b), 0, false);
            }
        }
        out
    }

    pub fn to_laurent(&self) -> LaurentPolynomial {
        let mut terms = BTreeMap::new();
        for (z, p) in &self.parts {
            for (e, c) in p.terms() {
                terms.insert(ExponentVector::zq(*z, e), c);
            }
        }
        LaurentPolynomial::from_sorted_unchecked(2, terms)
    }
}

impl From<QPoly> for ZqPoly {
    fn from(p: QPoly) -> Self {
        let mut out = ZqPoly::new();
        out.add_part(0, &p, 0, false);
        out
    }
}
