//! q-combinatorial building blocks: Gaussian binomials (plain and starred,
//! in any base `q^k`), rising q-factorials and their two q-binomial-theorem
//! expansions, the Andrews–Baxter trinomial `T₀`, and Andrews'
//! z-generalized binomial.
//!
//! Gaussian binomials are built by the Pascal rule
//! `[A,B] = [A-1,B] + q^(A-B) [A-1,B-1]` and memoized in a
//! [`BinomialTable`]. Each table belongs to one owner (a builder or the
//! calling thread), so no locking is involved.

use std::cell::RefCell;

use num_bigint::BigInt;
use num_traits::One;

use crate::dense::{QPoly, ZqPoly, ZERO_QPOLY};
use crate::laurent::{ExponentVector, LaurentPolynomial};

/// Arguments of `[A, B]` in base `q^base_step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QBinomialArgs {
    pub a: i64,
    pub b: i64,
    pub base_step: u32,
}

impl QBinomialArgs {
    pub fn new(a: i64, b: i64, base_step: u32) -> Self {
        assert!(base_step >= 1, "base step must be positive");
        Self { a, b, base_step }
    }
}

/// Memo of Gaussian binomials in base `q` and base `q²`.
#[derive(Debug)]
pub(crate) struct BinomialTable {
    base_q: Vec<Vec<QPoly>>,
    base_q2: Vec<Vec<QPoly>>,
    one: QPoly,
}

impl Default for BinomialTable {
    fn default() -> Self {
        Self::new()
    }
}

impl BinomialTable {
    pub fn new() -> Self {
        Self {
            base_q: Vec::new(),
            base_q2: Vec::new(),
            one: QPoly::one(),
        }
    }

    /// Makes rows `0..=a` of the base-`q` table available.
    pub fn ensure_q(&mut self, a: i64) {
        while (self.base_q.len() as i64) <= a {
            let n = self.base_q.len();
            let mut row = Vec::with_capacity(n + 1);
            row.push(QPoly::one());
            for b in 1..n {
                let prev = &self.base_q[n - 1];
                let mut cell = prev[b].clone();
                cell.add_scaled(&prev[b - 1], (n - b) as i64, false);
                row.push(cell);
            }
            if n > 0 {
                row.push(QPoly::one());
            }
            self.base_q.push(row);
        }
    }

    /// Makes rows `0..=a` of the base-`q²` table available.
    pub fn ensure_q2(&mut self, a: i64) {
        self.ensure_q(a);
        while (self.base_q2.len() as i64) <= a {
            let n = self.base_q2.len();
            let row = self.base_q[n].iter().map(|p| p.substitute(2)).collect();
            self.base_q2.push(row);
        }
    }

    fn lookup(rows: &[Vec<QPoly>], a: i64, b: i64) -> &QPoly {
        if a < 0 || b < 0 || b > a {
            return &ZERO_QPOLY;
        }
        rows.get(a as usize)
            .map(|row| &row[b as usize])
            .unwrap_or_else(|| panic!("binomial row {a} not prepared"))
    }

    /// `[a, b]_q`; rows must have been prepared with [`Self::ensure_q`].
    pub fn q(&self, a: i64, b: i64) -> &QPoly {
        Self::lookup(&self.base_q, a, b)
    }

    /// `[a, b]_{q²}`; rows must have been prepared with [`Self::ensure_q2`].
    pub fn q2(&self, a: i64, b: i64) -> &QPoly {
        Self::lookup(&self.base_q2, a, b)
    }

    pub fn q2_star(&self, a: i64, b: i64) -> &QPoly {
        if a == -1 && b == 0 {
            &self.one
        } else {
            self.q2(a, b)
        }
    }

    /// Any base, owned. Prepares rows as needed.
    pub fn any_base(&mut self, args: QBinomialArgs, star: bool) -> QPoly {
        if star && args.a == -1 && args.b == 0 {
            return QPoly::one();
        }
        match args.base_step {
            1 => {
                self.ensure_q(args.a);
                self.q(args.a, args.b).clone()
            }
            2 => {
                self.ensure_q2(args.a);
                self.q2(args.a, args.b).clone()
            }
            k => {
                self.ensure_q(args.a);
                self.q(args.a, args.b).substitute(k as i64)
            }
        }
    }

    /// `T₀(l, a; q)`; needs base-`q` rows up to `2l` and base-`q²` rows up
    /// to `l`.
    pub fn t0(&self, l: i64, a: i64) -> QPoly {
        let mut out = QPoly::zero();
        for r in 0..=l {
            let inner = self.q(2 * l - 2 * r, l - a - r);
            if inner.is_zero() {
                continue;
            }
            let prod = self.q2(l, r).mul(inner);
            out.add_scaled(&prod, 0, r % 2 == 1);
        }
        out
    }
}

thread_local! {
    static TABLE: RefCell<BinomialTable> = RefCell::new(BinomialTable::new());
}

fn with_table<T>(f: impl FnOnce(&mut BinomialTable) -> T) -> T {
    TABLE.with(|t| f(&mut t.borrow_mut()))
}

/// The Gaussian polynomial `[A, B]` in `q^k`; zero unless `0 <= B <= A`.
pub fn gaussian_binomial(args: QBinomialArgs) -> LaurentPolynomial {
    with_table(|t| t.any_base(args, false)).to_laurent(0)
}

/// Same as [`gaussian_binomial`] except `[-1, 0]* = 1`.
pub fn gaussian_binomial_star(args: QBinomialArgs) -> LaurentPolynomial {
    with_table(|t| t.any_base(args, true)).to_laurent(0)
}

/// `(t; q^k)_j` for the monomial `t = z^a_zexp q^a_qexp`.
pub fn rising_q_factorial(a_zexp: i64, a_qexp: i64, j: u32, k: u32) -> LaurentPolynomial {
    rising_dense(a_zexp, a_qexp, j, k).to_laurent()
}

pub(crate) fn rising_dense(a_zexp: i64, a_qexp: i64, j: u32, k: u32) -> ZqPoly {
    let mut acc = ZqPoly::from(QPoly::one());
    for i in 0..j as i64 {
        let mut next = acc.clone();
        for (z, p) in acc.parts() {
            next.add_part(z + a_zexp, p, a_qexp + k as i64 * i, true);
        }
        acc = next;
    }
    acc
}

/// `Σ_h (-1)^h t^h q^(k h(h-1)/2) [j, h]_{q^k}`, the finite q-binomial
/// theorem expansion of `(t; q^k)_j`.
pub fn pochhammer_expansion_qbt1(a_zexp: i64, a_qexp: i64, j: u32, k: u32) -> LaurentPolynomial {
    let j = j as i64;
    let kk = k as i64;
    let mut out = LaurentPolynomial::zero(2);
    for h in 0..=j {
        let binom = gaussian_binomial(QBinomialArgs::new(j, h, k));
        let sign = if h % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let m = ExponentVector::zq(a_zexp * h, a_qexp * h + kk * h * (h - 1) / 2);
        out.add_scaled_assign(&binom, &m, &sign).expect("arity 2");
    }
    out
}

/// Coefficient of `t^h` in `1/(t; q^k)_j`, the starred binomial
/// `[h + j - 1, h]*_{q^k}`.
pub fn inverse_pochhammer_coefficient(h: u32, j: u32, k: u32) -> LaurentPolynomial {
    gaussian_binomial_star(QBinomialArgs::new(h as i64 + j as i64 - 1, h as i64, k))
}

/// Andrews–Baxter `T₀(L, A; q) = Σ_{r=0}^{L} (-1)^r [L, r]_{q²} [2L-2r, L-A-r]_q`,
/// zero for `L < 0`.
pub fn trinomial_t0(l: i64, a: i64) -> LaurentPolynomial {
    if l < 0 {
        return LaurentPolynomial::zero(2);
    }
    with_table(|t| {
        t.ensure_q(2 * l);
        t.ensure_q2(l);
        t.t0(l, a)
    })
    .to_laurent(0)
}

/// Andrews' generalized binomial with monomial argument
/// `ζ = z^z_zexp q^z_qexp`:
///
/// * `0` if `B < 0`,
/// * `1` if `B = 0` or `B = A`,
/// * `Σ_{h=0}^{B} ζ^h [A-B+h-1, h]_q` if `0 < B < A`,
/// * `(ζ q^(A-B); q)_(B-A)` if `B > A`.
pub fn andrews_z_binomial(a: i64, b: i64, z_zexp: i64, z_qexp: i64) -> LaurentPolynomial {
    with_table(|t| andrews_dense(t, a, b, z_zexp, z_qexp)).to_laurent()
}

pub(crate) fn andrews_dense(t: &mut BinomialTable, a: i64, b: i64, z_zexp: i64, z_qexp: i64) -> ZqPoly {
    if b < 0 {
        return ZqPoly::new();
    }
    if b == 0 || b == a {
        return ZqPoly::from(QPoly::one());
    }
    if b < a {
        t.ensure_q(a);
        let mut out = ZqPoly::new();
        for h in 0..=b {
            out.add_part(z_zexp * h, t.q(a - b + h - 1, h), z_qexp * h, false);
        }
        return out;
    }
    rising_dense(z_zexp, z_qexp + a - b, (b - a) as u32, 1)
}
