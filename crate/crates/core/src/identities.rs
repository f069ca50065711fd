//! Both sides of the three finite identities, their boundary corrections,
//! the characterizing recurrences, and the equality engine. The aRRf
//! family (polynomial generalizations of the two-variable Rogers–Ramanujan
//! identity) is checked here too.
//!
//! The left sides are evaluated by grouping the inner `(h, i)` double sum
//! on `m = h + i`: the `(h, i)`-dependent factor `D[j][m]` does not depend
//! on `n`, and the remaining factor depends on `(j, m, n)` only through a
//! single binomial (or, for the quadruple sum, a one-dimensional `ℓ`-sum
//! that is itself memoized). A [`SideBuilder`] keeps those tables, so
//! computing a whole sequence `P_0..P_n` costs little more than `P_n`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::dense::{QPoly, ZqPoly};
use crate::error::{Error, Result};
use crate::laurent::{ExponentVector, LaurentPolynomial, RationalValue};
use crate::qcomb::{andrews_dense, BinomialTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    R1Finite,
    R1PartnerFinite,
    R2Finite,
    Arrf1,
    Arrf2,
    Arrf3,
}

impl IdentityId {
    pub const ALL: [IdentityId; 6] = [
        IdentityId::R1Finite,
        IdentityId::R1PartnerFinite,
        IdentityId::R2Finite,
        IdentityId::Arrf1,
        IdentityId::Arrf2,
        IdentityId::Arrf3,
    ];

    /// The three finite two-variable identities.
    pub const FINITE: [IdentityId; 3] = [IdentityId::R1Finite, IdentityId::R1PartnerFinite, IdentityId::R2Finite];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::R1Finite => "R1_FINITE",
            IdentityId::R1PartnerFinite => "R1_PARTNER_FINITE",
            IdentityId::R2Finite => "R2_FINITE",
            IdentityId::Arrf1 => "ARRF1",
            IdentityId::Arrf2 => "ARRF2",
            IdentityId::Arrf3 => "ARRF3",
        }
    }

    /// Short command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            IdentityId::R1Finite => "r1",
            IdentityId::R1PartnerFinite => "r1p",
            IdentityId::R2Finite => "r2",
            IdentityId::Arrf1 => "arrf1",
            IdentityId::Arrf2 => "arrf2",
            IdentityId::Arrf3 => "arrf3",
        }
    }

    pub fn is_finite_identity(self) -> bool {
        Self::FINITE.contains(&self)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let id = match key.as_str() {
            "r1" | "r1_finite" => IdentityId::R1Finite,
            "r1p" | "r1partner" | "r1_partner" | "r1_partner_finite" => IdentityId::R1PartnerFinite,
            "r2" | "r2_finite" => IdentityId::R2Finite,
            "arrf1" => IdentityId::Arrf1,
            "arrf2" => IdentityId::Arrf2,
            "arrf3" => IdentityId::Arrf3,
            _ => return Err(Error::UnknownIdentity(s.to_string())),
        };
        Ok(id)
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

fn require_finite(id: IdentityId, op: &'static str) -> Result<()> {
    if id.is_finite_identity() {
        Ok(())
    } else {
        Err(Error::Unsupported { op, id })
    }
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

// ---------------------------------------------------------------------------
// Side builders
// ---------------------------------------------------------------------------

/// Memoizing evaluator for both sides of one finite identity.
#[derive(Debug)]
pub struct SideBuilder {
    id: IdentityId,
    table: BinomialTable,
    /// `groups[j][m]`: the `(h, i)` double sum restricted to `h + i = m`,
    /// including the `q^(..j..)` prefactor.
    groups: Vec<Vec<ZqPoly>>,
    /// R2 only: `S(j, N) = Σ_ℓ (-1)^ℓ q^(2ℓ) [j+ℓ-1, ℓ]*_{q²} [N+j-ℓ, 2j]_q`.
    ell_sums: HashMap<(i64, i64), QPoly>,
    /// `T₀(L, |A|)`.
    t0: HashMap<(i64, i64), QPoly>,
}

impl SideBuilder {
    pub fn new(id: IdentityId) -> Result<Self> {
        require_finite(id, "side builder")?;
        Ok(Self {
            id,
            table: BinomialTable::new(),
            groups: Vec::new(),
            ell_sums: HashMap::new(),
            t0: HashMap::new(),
        })
    }

    pub fn identity(&self) -> IdentityId {
        self.id
    }

    fn prepare_rows(&mut self, n: i64) {
        self.table.ensure_q(2 * n + 2);
        self.table.ensure_q2(n + 2);
    }

    fn ensure_groups(&mut self, jmax: i64) {
        while (self.groups.len() as i64) <= jmax {
            let j = self.groups.len() as i64;
            let row = match self.id {
                IdentityId::R1Finite => self.symmetric_groups(j, 2 * j * j),
                IdentityId::R2Finite => self.symmetric_groups(j, j * j),
                IdentityId::R1PartnerFinite => self.partner_groups(j),
                _ => unreachable!(),
            };
            self.groups.push(row);
        }
    }

    /// `Σ_{h+i=m} (-1)^m z^(h-i) q^(pre + h² + i²) [j,h]_{q²} [j,i]_{q²}`.
    fn symmetric_groups(&mut self, j: i64, pre: i64) -> Vec<ZqPoly> {
        self.table.ensure_q2(j);
        let mut row = vec![ZqPoly::new(); (2 * j + 1) as usize];
        for h in 0..=j {
            for i in h..=j {
                let prod = self.table.q2(j, h).mul(self.table.q2(j, i));
                let m = (h + i) as usize;
                let shift = pre + h * h + i * i;
                let neg = odd(h + i);
                row[m].add_part(h - i, &prod, shift, neg);
                if h != i {
                    row[m].add_part(i - h, &prod, shift, neg);
                }
            }
        }
        row
    }

    /// `Σ_{h+i=m} (-1)^m z^(h-i) q^(C(h,2) + C(i+1,2) + j(j+1)) [j,h]_q [j+1,i]_q`.
    fn partner_groups(&mut self, j: i64) -> Vec<ZqPoly> {
        self.table.ensure_q(j + 1);
        let mut row = vec![ZqPoly::new(); (2 * j + 2) as usize];
        for h in 0..=j {
            for i in 0..=j + 1 {
                let prod = self.table.q(j, h).mul(self.table.q(j + 1, i));
                let shift = h * (h - 1) / 2 + i * (i + 1) / 2 + j * (j + 1);
                row[(h + i) as usize].add_part(h - i, &prod, shift, odd(h + i));
            }
        }
        row
    }

    fn ell_sum(&mut self, j: i64, big_n: i64) -> &QPoly {
        let table = &self.table;
        self.ell_sums.entry((j, big_n)).or_insert_with(|| {
            let mut acc = QPoly::zero();
            // [N+j-ℓ, 2j]_q vanishes once ℓ > N - j
            for ell in 0..=big_n - j {
                let prod = table.q2_star(j + ell - 1, ell).mul(table.q(big_n + j - ell, 2 * j));
                acc.add_scaled(&prod, 2 * ell, odd(ell));
            }
            acc
        })
    }

    /// The left side `P_n(z, q)` as a finite multi-sum.
    pub fn lhs(&mut self, n: u32) -> LaurentPolynomial {
        let n = n as i64;
        self.prepare_rows(n);
        let jmax = match self.id {
            IdentityId::R2Finite => n,
            _ => n / 2,
        };
        self.ensure_groups(jmax);
        if self.id == IdentityId::R2Finite {
            for j in 0..=jmax {
                for m in 0..=(2 * j).min(n - j) {
                    self.ell_sum(j, n - m);
                }
            }
        }
        let mut acc = ZqPoly::new();
        for j in 0..=jmax {
            for (m, group) in self.groups[j as usize].iter().enumerate() {
                let m = m as i64;
                let kernel = match self.id {
                    IdentityId::R1Finite => self.table.q2(j + (n - m).div_euclid(2), 2 * j),
                    IdentityId::R1PartnerFinite => self.table.q(j + 1 + (n - m).div_euclid(2), 2 * j + 1),
                    IdentityId::R2Finite => match self.ell_sums.get(&(j, n - m)) {
                        Some(k) => k,
                        None => continue,
                    },
                    _ => unreachable!(),
                };
                if !kernel.is_zero() {
                    acc.add_product(group, kernel, 0, false);
                }
            }
        }
        acc.to_laurent()
    }

    fn t0_cached(&mut self, l: i64, a: i64) -> QPoly {
        if l < 0 {
            return QPoly::zero();
        }
        let key = (l, a.abs());
        if let Some(p) = self.t0.get(&key) {
            return p.clone();
        }
        self.table.ensure_q(2 * l);
        self.table.ensure_q2(l);
        let p = self.table.t0(l, a.abs());
        self.t0.insert(key, p.clone());
        p
    }

    /// The bilateral main sum of the right side, over the window
    /// `|j| <= n + 2` (terms outside the support vanish).
    pub fn rhs_main(&mut self, n: u32) -> LaurentPolynomial {
        let n = n as i64;
        self.prepare_rows(n);
        let mut acc = ZqPoly::new();
        for j in -(n + 2)..=(n + 2) {
            match self.id {
                IdentityId::R1Finite => {
                    let b = self.table.q2(n - 1, (n + 3 * j - 1).div_euclid(2));
                    acc.add_part(j, b, 3 * j * j, odd(j));
                }
                IdentityId::R1PartnerFinite => {
                    let b = self.table.q(n, (n + 3 * j + 2).div_euclid(2));
                    acc.add_part(j, b, j * (3 * j + 1) / 2, odd(j));
                }
                IdentityId::R2Finite => {
                    let mut t = self.t0_cached(n, 2 * j);
                    t.add_scaled(&self.t0_cached(n - 1, 2 * j), 0, false);
                    acc.add_part(j, &t, 2 * j * j, odd(j));
                }
                _ => unreachable!(),
            }
        }
        acc.to_laurent()
    }

    /// The parity-dependent boundary correction `ε_n`; zero for R2.
    pub fn epsilon(&mut self, n: u32) -> LaurentPolynomial {
        let n = n as i64;
        self.prepare_rows(n);
        let mut acc = ZqPoly::new();
        let even = n % 2 == 0;
        for j in -(n + 2)..=(n + 2) {
            match (self.id, even) {
                (IdentityId::R1Finite, true) => {
                    let b = self.table.q2_star(n - 1, (n + 6 * j) / 2);
                    acc.add_part(2 * j, b, 12 * j * j + 6 * j + n, false);
                }
                (IdentityId::R1Finite, false) => {
                    let b = self.table.q2_star(n - 1, (n + 6 * j - 3) / 2);
                    acc.add_part(2 * j - 1, b, 12 * j * j - 6 * j + n, true);
                }
                (IdentityId::R1PartnerFinite, true) => {
                    let b = self.table.q(n, n / 2 + 3 * j);
                    acc.add_part(2 * j, b, 6 * j * j - 2 * j + n / 2, false);
                }
                (IdentityId::R1PartnerFinite, false) => {
                    // q^(6j² + 4j + 1/2 + n/2) with n odd
                    let b = self.table.q(n, (n + 6 * j + 3) / 2);
                    acc.add_part(2 * j + 1, b, 6 * j * j + 4 * j + (n + 1) / 2, true);
                }
                (IdentityId::R2Finite, _) => return LaurentPolynomial::zero(2),
                _ => unreachable!(),
            }
        }
        acc.to_laurent()
    }

    pub fn rhs(&mut self, n: u32) -> LaurentPolynomial {
        &self.rhs_main(n) + &self.epsilon(n)
    }

    pub fn lhs_sequence(&mut self, n_max: u32) -> Vec<LaurentPolynomial> {
        (0..=n_max).map(|n| self.lhs(n)).collect()
    }

    pub fn rhs_sequence(&mut self, n_max: u32) -> Vec<LaurentPolynomial> {
        (0..=n_max).map(|n| self.rhs(n)).collect()
    }
}

pub fn lhs_poly(id: IdentityId, n: u32) -> Result<LaurentPolynomial> {
    Ok(SideBuilder::new(id)?.lhs(n))
}

pub fn rhs_main_poly(id: IdentityId, n: u32) -> Result<LaurentPolynomial> {
    Ok(SideBuilder::new(id)?.rhs_main(n))
}

pub fn epsilon_poly(id: IdentityId, n: u32) -> Result<LaurentPolynomial> {
    Ok(SideBuilder::new(id)?.epsilon(n))
}

pub fn rhs_poly(id: IdentityId, n: u32) -> Result<LaurentPolynomial> {
    Ok(SideBuilder::new(id)?.rhs(n))
}

// ---------------------------------------------------------------------------
// Recurrences
// ---------------------------------------------------------------------------

/// `P_n = Σ_{i=1}^{order} c_i(z, q, q^n) P_{n-i}` with initial values.
///
/// Lag coefficients are arity-3 polynomials in `(z, q, Q)` where `Q`
/// stands for `q^n`, `n` being the index of the term being computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub order: usize,
    pub lag_coefficients: Vec<LaurentPolynomial>,
    pub initial_conditions: Vec<LaurentPolynomial>,
}

impl RecurrenceSpec {
    pub fn new(lag_coefficients: Vec<LaurentPolynomial>, initial_conditions: Vec<LaurentPolynomial>) -> Result<Self> {
        let order = lag_coefficients.len();
        if order == 0 {
            return Err(Error::Degenerate("recurrence of order 0".into()));
        }
        if initial_conditions.len() != order {
            return Err(Error::Degenerate(format!(
                "order {order} needs {order} initial conditions, got {}",
                initial_conditions.len()
            )));
        }
        for c in &lag_coefficients {
            if c.arity() != 3 {
                return Err(Error::ArityMismatch { left: 3, right: c.arity() });
            }
        }
        for p in &initial_conditions {
            if p.arity() != 2 {
                return Err(Error::ArityMismatch { left: 2, right: p.arity() });
            }
        }
        Ok(Self {
            order,
            lag_coefficients,
            initial_conditions,
        })
    }

    /// The coefficient of `P_{n-lag}` at index `n`, with `q^n` substituted.
    pub fn coefficient_at(&self, lag: usize, n: i64) -> LaurentPolynomial {
        self.lag_coefficients[lag - 1]
            .collapse_q_power(n)
            .expect("lag coefficients have arity 3")
    }

    /// `seq[n] - Σ c_i(n) seq[n-i]`; zero iff the recurrence holds at `n`.
    pub fn residual(&self, seq: &[LaurentPolynomial], n: usize) -> Result<LaurentPolynomial> {
        if n < self.order {
            return Err(Error::InvalidRange(format!("index {n} is below the order {}", self.order)));
        }
        if n >= seq.len() {
            return Err(Error::SequenceTooShort { needed: n, have: seq.len() });
        }
        let mut r = seq[n].clone();
        for lag in 1..=self.order {
            let c = self.coefficient_at(lag, n as i64);
            r = &r - &(&c * &seq[n - lag]);
        }
        Ok(r)
    }
}

fn zqn(terms: &[(i64, i64, i64, i64)]) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(3, terms.iter().map(|&(z, q, qn, c)| (ExponentVector::zqn(z, q, qn), c)))
        .expect("arity 3")
}

fn zq(terms: &[(i64, i64, i64)]) -> LaurentPolynomial {
    LaurentPolynomial::from_terms(2, terms.iter().map(|&(z, q, c)| (ExponentVector::zq(z, q), c))).expect("arity 2")
}

/// The recurrence (with initial conditions) satisfied by the left side.
pub fn recurrence_spec(id: IdentityId) -> Result<RecurrenceSpec> {
    require_finite(id, "recurrence_spec")?;
    let spec = match id {
        IdentityId::R1Finite => RecurrenceSpec::new(
            vec![
                // 1 - q^2
                zqn(&[(0, 0, 0, 1), (0, 2, 0, -1)]),
                // 2q^2 + q^(2n-2)
                zqn(&[(0, 2, 0, 2), (0, -2, 2, 1)]),
                // q^4 - q^2 - (z + 1/z) q^(2n-3)
                zqn(&[(0, 4, 0, 1), (0, 2, 0, -1), (1, -3, 2, -1), (-1, -3, 2, -1)]),
                // q^(2n-4) - q^4
                zqn(&[(0, -4, 2, 1), (0, 4, 0, -1)]),
            ],
            vec![
                zq(&[(0, 0, 1)]),
                zq(&[(0, 0, 1)]),
                zq(&[(0, 0, 1), (0, 2, 1)]),
                zq(&[(0, 0, 1), (0, 2, 1), (1, 3, -1), (-1, 3, -1)]),
            ],
        ),
        IdentityId::R1PartnerFinite => RecurrenceSpec::new(
            vec![
                // 1 - q
                zqn(&[(0, 0, 0, 1), (0, 1, 0, -1)]),
                // 2q + q^n
                zqn(&[(0, 1, 0, 2), (0, 0, 1, 1)]),
                // q^2 - q - (z q^2 + q^3 / z) q^(n-3)
                zqn(&[(0, 2, 0, 1), (0, 1, 0, -1), (1, -1, 1, -1), (-1, 0, 1, -1)]),
                // q^(n-1) - q^2
                zqn(&[(0, -1, 1, 1), (0, 2, 0, -1)]),
            ],
            vec![
                zq(&[(0, 0, 1)]),
                zq(&[(0, 0, 1), (-1, 1, -1)]),
                zq(&[(0, 0, 1), (0, 1, 1), (-1, 1, -1), (0, 2, 1)]),
                zq(&[
                    (0, 0, 1),
                    (0, 1, 1),
                    (-1, 1, -1),
                    (0, 2, 1),
                    (1, 2, -1),
                    (-1, 2, -1),
                    (-1, 3, -1),
                    (-1, 4, -1),
                ]),
            ],
        ),
        IdentityId::R2Finite => RecurrenceSpec::new(
            vec![
                // 1 + q - q^2 + q^(2n-1)
                zqn(&[(0, 0, 0, 1), (0, 1, 0, 1), (0, 2, 0, -1), (0, -1, 2, 1)]),
                // q^3 + q^2 - q - (z + 1/z) q^(2n-2)
                zqn(&[(0, 3, 0, 1), (0, 2, 0, 1), (0, 1, 0, -1), (1, -2, 2, -1), (-1, -2, 2, -1)]),
                // q^(2n-3) - q^3
                zqn(&[(0, -3, 2, 1), (0, 3, 0, -1)]),
            ],
            vec![
                zq(&[(0, 0, 1)]),
                zq(&[(0, 0, 1), (0, 1, 1)]),
                zq(&[(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 2, -1), (-1, 2, -1), (0, 4, 1)]),
            ],
        ),
        _ => unreachable!(),
    };
    spec
}

/// `P_0..P_{n_max}` from the initial conditions.
pub fn run_recurrence(spec: &RecurrenceSpec, n_max: usize) -> Vec<LaurentPolynomial> {
    let mut seq: Vec<LaurentPolynomial> = spec.initial_conditions.iter().take(n_max + 1).cloned().collect();
    for n in spec.order..=n_max {
        let mut next = LaurentPolynomial::zero(2);
        for lag in 1..=spec.order {
            next = &next + &(&spec.coefficient_at(lag, n as i64) * &seq[n - lag]);
        }
        seq.push(next);
    }
    seq
}

// ---------------------------------------------------------------------------
// Verification reports
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Left and right sides differ.
    SidesDiffer,
    /// Left side does not match the stated initial conditions.
    InitialConditions,
    LhsRecurrence,
    RhsRecurrence,
    /// Exact evaluation of the two sides disagrees at a sample point.
    PointMismatch,
}

fn ser_rational<S: Serializer>(r: &RationalValue, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_point<S: Serializer>(p: &(RationalValue, RationalValue), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&p.0.to_string())?;
    t.serialize_element(&p.1.to_string())?;
    t.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Difference {
    /// `lhs - rhs`, or the recurrence residual.
    Polynomial(LaurentPolynomial),
    Rational {
        #[serde(serialize_with = "ser_point")]
        point: (RationalValue, RationalValue),
        #[serde(serialize_with = "ser_rational")]
        value: RationalValue,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub n: u32,
    pub kind: FailureKind,
    pub difference: Difference,
}

/// A sample point skipped because a denominator factor vanishes there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedPoint {
    pub n: u32,
    #[serde(serialize_with = "ser_point")]
    pub point: (RationalValue, RationalValue),
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub identity: IdentityId,
    /// Inclusive range of `n` examined.
    pub n_checked: (u32, u32),
    pub status: Status,
    pub first_failure: Option<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rejected_points: Vec<RejectedPoint>,
}

impl VerificationReport {
    fn new(identity: IdentityId, n_checked: (u32, u32), first_failure: Option<Failure>, rejected_points: Vec<RejectedPoint>) -> Self {
        let status = if first_failure.is_none() { Status::Pass } else { Status::Fail };
        Self {
            identity,
            n_checked,
            status,
            first_failure,
            rejected_points,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Checks, for each `0 <= n <= n_max`, that the two sides agree, that the
/// left side starts with the stated initial conditions, and that both the
/// left-side and right-side sequences satisfy the recurrence. For the aRRf
/// identities the sides are compared as polynomials (aRRf3) or by exact
/// evaluation at the default sample points (aRRf1, aRRf2).
pub fn verify_identity(id: IdentityId, n_max: u32) -> Result<VerificationReport> {
    match id {
        IdentityId::Arrf1 | IdentityId::Arrf2 => {
            let mut rejected = Vec::new();
            for n in 0..=n_max {
                let r = arrf12_spot_check(id, n, &default_sample_points())?;
                rejected.extend(r.rejected_points);
                if let Some(f) = r.first_failure {
                    return Ok(VerificationReport::new(id, (0, n_max), Some(f), rejected));
                }
            }
            Ok(VerificationReport::new(id, (0, n_max), None, rejected))
        }
        IdentityId::Arrf3 => {
            let mut builder = ArrfBuilder::new();
            for n in 0..=n_max {
                let (l, r) = builder.arrf3_sides(n);
                if l != r {
                    let f = Failure {
                        n,
                        kind: FailureKind::SidesDiffer,
                        difference: Difference::Polynomial(&l - &r),
                    };
                    return Ok(VerificationReport::new(id, (0, n_max), Some(f), vec![]));
                }
            }
            Ok(VerificationReport::new(id, (0, n_max), None, vec![]))
        }
        _ => {
            let mut builder = SideBuilder::new(id)?;
            let lhs = builder.lhs_sequence(n_max);
            let rhs = builder.rhs_sequence(n_max);
            let spec = recurrence_spec(id)?;
            Ok(VerificationReport::new(
                id,
                (0, n_max),
                first_sequence_failure(&spec, &lhs, &rhs),
                vec![],
            ))
        }
    }
}

/// First failure, in ascending `n`, among side equality, initial
/// conditions, and recurrence satisfaction of both sequences.
pub fn first_sequence_failure(
    spec: &RecurrenceSpec,
    lhs: &[LaurentPolynomial],
    rhs: &[LaurentPolynomial],
) -> Option<Failure> {
    let poly_failure = |n: usize, kind, d: LaurentPolynomial| Failure {
        n: n as u32,
        kind,
        difference: Difference::Polynomial(d),
    };
    for n in 0..lhs.len().min(rhs.len()) {
        if lhs[n] != rhs[n] {
            return Some(poly_failure(n, FailureKind::SidesDiffer, &lhs[n] - &rhs[n]));
        }
        if n < spec.order {
            if lhs[n] != spec.initial_conditions[n] {
                return Some(poly_failure(n, FailureKind::InitialConditions, &lhs[n] - &spec.initial_conditions[n]));
            }
            continue;
        }
        let r = spec.residual(lhs, n).expect("index in range");
        if !r.is_zero() {
            return Some(poly_failure(n, FailureKind::LhsRecurrence, r));
        }
        let r = spec.residual(rhs, n).expect("index in range");
        if !r.is_zero() {
            return Some(poly_failure(n, FailureKind::RhsRecurrence, r));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// aRRf family
// ---------------------------------------------------------------------------

/// Builds both sides of aRRf3, whose summands are polynomials term by term.
#[derive(Debug, Default)]
pub struct ArrfBuilder {
    table: BinomialTable,
}

impl ArrfBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// `(lhs, rhs)` of aRRf3 at `n`:
    ///
    /// `Σ_j z^j q^(j²) G(n, j; q)` against
    /// `Σ_{2j<=n} (-1)^j z^(2j) q^(j(5j-1)/2) G(n,j;q) G(2n+1-2j, n-2j; zq^j)
    ///  - Σ_{2j<=n-1} (-1)^j z^(2j+1) q^(j(5j+3)/2) G(n,j;q) G(2n-2j, n-2j-1; zq^j)`
    /// where `G` is Andrews' generalized binomial.
    pub fn arrf3_sides(&mut self, n: u32) -> (LaurentPolynomial, LaurentPolynomial) {
        let n = n as i64;
        let t = &mut self.table;
        t.ensure_q(2 * n + 2);
        let mut lhs = ZqPoly::new();
        for j in 0..=n {
            lhs.add_assign(&andrews_dense(t, n, j, 0, 1), j, j * j, false);
        }
        let mut rhs = ZqPoly::new();
        for j in 0..=n / 2 {
            let left = andrews_dense(t, n, j, 0, 1);
            let right = andrews_dense(t, 2 * n + 1 - 2 * j, n - 2 * j, 1, j);
            rhs.add_assign(&left.mul(&right), 2 * j, j * (5 * j - 1) / 2, odd(j));
        }
        for j in 0..=n {
            if 2 * j > n - 1 {
                break;
            }
            let left = andrews_dense(t, n, j, 0, 1);
            let right = andrews_dense(t, 2 * n - 2 * j, n - 2 * j - 1, 1, j);
            rhs.add_assign(&left.mul(&right), 2 * j + 1, j * (5 * j + 3) / 2, !odd(j));
        }
        (lhs.to_laurent(), rhs.to_laurent())
    }
}

pub fn arrf3_sides(n: u32) -> (LaurentPolynomial, LaurentPolynomial) {
    ArrfBuilder::new().arrf3_sides(n)
}

fn rat(n: i64, d: i64) -> RationalValue {
    RationalValue::new(BigInt::from(n), BigInt::from(d))
}

/// Sample points `(z, q)` used for the aRRf1/aRRf2 evaluation checks.
pub fn default_sample_points() -> Vec<(RationalValue, RationalValue)> {
    vec![
        (rat(2, 1), rat(1, 3)),
        (rat(3, 1), rat(1, 2)),
        (rat(5, 1), rat(2, 7)),
        (rat(-2, 1), rat(1, 5)),
        (rat(7, 3), rat(3, 5)),
    ]
}

/// `(a; q)_len` at a rational point.
fn pochhammer_value(a: &RationalValue, q: &RationalValue, len: i64) -> RationalValue {
    let mut out = RationalValue::one();
    let mut qi = RationalValue::one();
    for _ in 0..len {
        out *= RationalValue::one() - a * &qi;
        qi *= q;
    }
    out
}

fn pow(x: &RationalValue, e: i64) -> RationalValue {
    num_traits::Pow::pow(x.clone(), e as i32)
}

/// Exact evaluation of both sides of aRRf1 or aRRf2 at each point.
///
/// aRRf1: `Σ_j z^j q^(j²) [n,j]_q = Σ_j (-1)^j z^(2j) q^(j(5j-1)/2) (1 - z q^(2j)) [n,j]_q / (z q^j; q)_(n+1)`.
///
/// aRRf2 has the same left side and right side
/// `Σ_{2j<=n} (-1)^j z^(2j) q^(j(5j-1)/2) (1 - z q^(2j)) [n,j]_q [n-j,j]_q (q;q)_j (z² q^(n+2j+1); q)_(n-2j) / (z q^j; q)_(n-j+1)`.
///
/// Points where `z = 0`, `q = 0` or a denominator factor `1 - z q^m`
/// vanishes are rejected rather than failed.
pub fn arrf12_spot_check(
    which: IdentityId,
    n: u32,
    points: &[(RationalValue, RationalValue)],
) -> Result<VerificationReport> {
    if !matches!(which, IdentityId::Arrf1 | IdentityId::Arrf2) {
        return Err(Error::Unsupported {
            op: "arrf12_spot_check",
            id: which,
        });
    }
    let ni = n as i64;
    let mut table = BinomialTable::new();
    table.ensure_q(ni);
    let binom_poly = |a: i64, b: i64| table.q(a, b).to_laurent(0);
    let mut rejected = Vec::new();
    for (z, q) in points {
        let reason = if z.is_zero() || q.is_zero() {
            Some("z and q must be nonzero".to_string())
        } else {
            // aRRf1 touches 1 - z q^m for m in 0..=2n, aRRf2 for m in 0..=n
            let m_max = if which == IdentityId::Arrf1 { 2 * ni } else { ni };
            (0..=m_max)
                .find(|&m| (RationalValue::one() - z * pow(q, m)).is_zero())
                .map(|m| format!("denominator factor 1 - z q^{m} vanishes"))
        };
        if let Some(reason) = reason {
            rejected.push(RejectedPoint {
                n,
                point: (z.clone(), q.clone()),
                reason,
            });
            continue;
        }
        let at = [z.clone(), q.clone()];
        let binom = |a: i64, b: i64| -> RationalValue { binom_poly(a, b).evaluate(&at).expect("nonzero point") };
        let lhs: RationalValue = (0..=ni).map(|j| pow(z, j) * pow(q, j * j) * binom(ni, j)).sum();
        let mut rhs = RationalValue::zero();
        for j in 0..=ni {
            if which == IdentityId::Arrf2 && 2 * j > ni {
                break;
            }
            let sign = if odd(j) { -RationalValue::one() } else { RationalValue::one() };
            let mut term = sign * pow(z, 2 * j) * pow(q, j * (5 * j - 1) / 2) * (RationalValue::one() - z * pow(q, 2 * j)) * binom(ni, j);
            let zq_j = z * pow(q, j);
            if which == IdentityId::Arrf1 {
                term /= pochhammer_value(&zq_j, q, ni + 1);
            } else {
                term *= binom(ni - j, j) * pochhammer_value(q, q, j);
                term *= pochhammer_value(&(z * z * pow(q, ni + 2 * j + 1)), q, ni - 2 * j);
                term /= pochhammer_value(&zq_j, q, ni - j + 1);
            }
            rhs += term;
        }
        if lhs != rhs {
            let failure = Failure {
                n,
                kind: FailureKind::PointMismatch,
                difference: Difference::Rational {
                    point: (z.clone(), q.clone()),
                    value: lhs - rhs,
                },
            };
            return Ok(VerificationReport::new(which, (n, n), Some(failure), rejected));
        }
    }
    Ok(VerificationReport::new(which, (n, n), None, rejected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
            assert_eq!(id.short_name().parse::<IdentityId>().unwrap(), id);
        }
        assert_eq!("R1-Partner".parse::<IdentityId>().unwrap(), IdentityId::R1PartnerFinite);
        assert_eq!("bogus".parse::<IdentityId>(), Err(Error::UnknownIdentity("bogus".into())));
    }

    #[test]
    fn lhs_examples() {
        assert_eq!(lhs_poly(IdentityId::R1Finite, 3).unwrap(), zq(&[(0, 0, 1), (0, 2, 1), (1, 3, -1), (-1, 3, -1)]));
        assert_eq!(lhs_poly(IdentityId::R1PartnerFinite, 1).unwrap(), zq(&[(0, 0, 1), (-1, 1, -1)]));
        assert_eq!(
            lhs_poly(IdentityId::R2Finite, 2).unwrap(),
            zq(&[(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 2, -1), (-1, 2, -1), (0, 4, 1)])
        );
        assert!(lhs_poly(IdentityId::R1Finite, 0).unwrap().is_one());
        assert!(matches!(lhs_poly(IdentityId::Arrf1, 2), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn rhs_examples() {
        assert!(rhs_main_poly(IdentityId::R1Finite, 0).unwrap().is_zero());
        assert!(rhs_main_poly(IdentityId::R2Finite, 0).unwrap().is_one());
        assert!(rhs_main_poly(IdentityId::R1Finite, 1).unwrap().is_one());
        assert!(epsilon_poly(IdentityId::R1Finite, 0).unwrap().is_one());
        assert!(epsilon_poly(IdentityId::R1Finite, 1).unwrap().is_zero());
        for n in 0..6 {
            assert!(epsilon_poly(IdentityId::R2Finite, n).unwrap().is_zero());
        }
        assert!(rhs_poly(IdentityId::R1Finite, 0).unwrap().is_one());
        assert!(rhs_poly(IdentityId::R2Finite, 0).unwrap().is_one());
        assert_eq!(rhs_poly(IdentityId::R1Finite, 3).unwrap(), lhs_poly(IdentityId::R1Finite, 3).unwrap());
    }

    #[test]
    fn recurrence_examples() {
        let r1 = recurrence_spec(IdentityId::R1Finite).unwrap();
        for n in 4..8 {
            assert_eq!(r1.coefficient_at(1, n), zq(&[(0, 0, 1), (0, 2, -1)]));
        }
        assert_eq!(r1.coefficient_at(2, 5), zq(&[(0, 2, 2), (0, 8, 1)]));
        let p = recurrence_spec(IdentityId::R1PartnerFinite).unwrap();
        assert_eq!(p.initial_conditions[1], zq(&[(0, 0, 1), (-1, 1, -1)]));
        assert_eq!(p.initial_conditions[2], zq(&[(0, 0, 1), (0, 1, 1), (-1, 1, -1), (0, 2, 1)]));
        assert_eq!(recurrence_spec(IdentityId::R2Finite).unwrap().order, 3);
        assert!(recurrence_spec(IdentityId::Arrf3).is_err());
    }

    #[test]
    fn run_recurrence_reproduces_initial_conditions() {
        let r1 = recurrence_spec(IdentityId::R1Finite).unwrap();
        assert_eq!(run_recurrence(&r1, 3), r1.initial_conditions);
        assert_eq!(run_recurrence(&r1, 10)[10], lhs_poly(IdentityId::R1Finite, 10).unwrap());
    }

    #[test]
    fn partner_p2_with_doubled_q2_term_is_inconsistent() {
        // Direct expansion of the n = 2 multi-sum: 1 + q - q/z + q^2.
        let mut spec = recurrence_spec(IdentityId::R1PartnerFinite).unwrap();
        assert_eq!(spec.initial_conditions[2], lhs_poly(IdentityId::R1PartnerFinite, 2).unwrap());
        spec.initial_conditions[2] = zq(&[(0, 0, 1), (0, 1, 1), (-1, 1, -1), (0, 2, 2)]);
        let seq = run_recurrence(&spec, 4);
        assert_ne!(seq[4], lhs_poly(IdentityId::R1PartnerFinite, 4).unwrap());
    }

    #[test]
    fn small_verification_passes() {
        for id in IdentityId::ALL {
            let report = verify_identity(id, 8).unwrap();
            assert!(report.passed(), "{id}: {:?}", report.first_failure);
        }
    }

    #[test]
    fn corrupted_sides_are_reported() {
        let spec = recurrence_spec(IdentityId::R1Finite).unwrap();
        let mut b = SideBuilder::new(IdentityId::R1Finite).unwrap();
        let lhs = b.lhs_sequence(6);
        let mut rhs = b.rhs_sequence(6);
        rhs[5] = &rhs[5] + &zq(&[(2, 9, 1)]);
        let f = first_sequence_failure(&spec, &lhs, &rhs).unwrap();
        assert_eq!(f.n, 5);
        assert_eq!(f.kind, FailureKind::SidesDiffer);
        assert_eq!(f.difference, Difference::Polynomial(zq(&[(2, 9, -1)])));
    }

    #[test]
    fn arrf3_small_cases() {
        let (l, r) = arrf3_sides(0);
        assert!(l.is_one() && r.is_one());
        // n = 1: lhs = 1 + zq; rhs = G(3,1;z) - z G(2,0;z) = (1 + z) - z + ... by expansion
        let (l, r) = arrf3_sides(1);
        assert_eq!(l, zq(&[(0, 0, 1), (1, 1, 1)]));
        assert_eq!(l, r);
    }

    #[test]
    fn spot_check_rejects_vanishing_denominator() {
        // 1 - z q^2 = 0 at z = 4, q = 1/2
        let pts = vec![(rat(4, 1), rat(1, 2)), (rat(2, 1), rat(1, 3))];
        let r = arrf12_spot_check(IdentityId::Arrf1, 3, &pts).unwrap();
        assert!(r.passed());
        assert_eq!(r.rejected_points.len(), 1);
        let r = arrf12_spot_check(IdentityId::Arrf1, 0, &[(rat(0, 1), rat(1, 2))]).unwrap();
        assert_eq!(r.rejected_points.len(), 1);
        assert!(arrf12_spot_check(IdentityId::Arrf3, 1, &pts).is_err());
    }
}
