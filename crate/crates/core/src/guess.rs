//! Guessing and certifying linear recurrences
//! `Σ_{i=0}^{r} c_i(z, q, q^n) P_{n-i} = 0` for a sequence of Laurent
//! polynomials.
//!
//! Each `c_i` ranges over the span of an ansatz basis of monomials
//! `z^a q^b Q^e`, `Q` standing for `q^n`. Equating every `(z, q)`
//! coefficient of the relation to zero gives a linear system over the
//! rationals. Its rank and a candidate nullspace are found modulo large
//! primes from evaluations at random points; the nullspace is lifted to
//! rationals and every lifted vector is then checked exactly against the
//! full system. The modular nullspace dimension bounds the rational one
//! from above, so once that many exact solutions are certified the basis
//! is complete.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::identities::{recurrence_spec, IdentityId, RecurrenceSpec, SideBuilder};
use crate::laurent::{ExponentVector, LaurentPolynomial, RationalValue};
use crate::linalg;

const SEED: u64 = 0x5eed_0f_2e_c0_2e;
/// Random evaluation rows beyond the number of unknowns.
const EXTRA_ROWS: usize = 24;
const MAX_PRIMES: usize = 12;
const MAX_ROUNDS: usize = 4;

/// Shape of the recurrence searched for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnsatzSpec {
    pub order: usize,
    /// Largest exponent of `Q = q^n`; exponents `0..=q_n_degree` are used.
    pub q_n_degree: u32,
    /// Inclusive range of `q`-exponents.
    pub q_degree_range: (i64, i64),
    pub z_exponents: BTreeSet<i64>,
}

impl AnsatzSpec {
    pub fn new(order: usize, q_n_degree: u32, q_degree_range: (i64, i64), z_exponents: impl IntoIterator<Item = i64>) -> Result<Self> {
        let z_exponents: BTreeSet<i64> = z_exponents.into_iter().collect();
        if order == 0 {
            return Err(Error::Degenerate("ansatz order must be positive".into()));
        }
        if q_degree_range.0 > q_degree_range.1 {
            return Err(Error::InvalidRange(format!("q-degree range {:?}", q_degree_range)));
        }
        if z_exponents.is_empty() {
            return Err(Error::Degenerate("empty z-exponent set".into()));
        }
        Ok(Self {
            order,
            q_n_degree,
            q_degree_range,
            z_exponents,
        })
    }

    /// The smallest box that holds the known recurrence of `id`.
    pub fn known_shape(id: IdentityId) -> Result<Self> {
        match id {
            IdentityId::R1Finite => Self::new(4, 2, (-4, 4), [-1, 0, 1]),
            IdentityId::R1PartnerFinite => Self::new(4, 1, (-1, 2), [-1, 0, 1]),
            IdentityId::R2Finite => Self::new(3, 2, (-3, 3), [-1, 0, 1]),
            _ => Err(Error::Unsupported { op: "known_shape", id }),
        }
    }

    /// Monomials `z^a q^b Q^e` allowed in each coefficient.
    pub fn basis(&self) -> Vec<ExponentVector> {
        let mut out = Vec::new();
        for e in 0..=self.q_n_degree as i64 {
            for b in self.q_degree_range.0..=self.q_degree_range.1 {
                for &a in &self.z_exponents {
                    out.push(ExponentVector::zqn(a, b, e));
                }
            }
        }
        out.sort();
        out
    }

    /// Number of unknowns: `(order + 1) · |basis|`.
    pub fn unknowns(&self) -> usize {
        (self.order + 1) * self.basis().len()
    }
}

/// `Σ_{i=0}^{order} c_i(z, q, Q := q^n) P_{n-i} = 0` with `c_0 ≠ 0`.
///
/// Coefficients are arity-3 polynomials; the integer coefficient vector
/// is kept primitive with a positive leading entry in `c_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateRecurrence {
    coefficients: Vec<LaurentPolynomial>,
}

impl CandidateRecurrence {
    pub fn new(coefficients: Vec<LaurentPolynomial>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::Degenerate("a recurrence needs at least c_0 and c_1".into()));
        }
        if let Some(c) = coefficients.iter().find(|c| c.arity() != 3) {
            return Err(Error::ArityMismatch { left: 3, right: c.arity() });
        }
        if coefficients[0].is_zero() {
            return Err(Error::Degenerate("c_0 must be nonzero".into()));
        }
        Ok(Self { coefficients })
    }

    /// `P_n - Σ c_i P_{n-i} = 0`, i.e. `c_0 = 1` and negated lag coefficients.
    pub fn from_recurrence_spec(spec: &RecurrenceSpec) -> Self {
        let mut coefficients = vec![LaurentPolynomial::one(3)];
        coefficients.extend(spec.lag_coefficients.iter().map(|c| -c));
        Self { coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[LaurentPolynomial] {
        &self.coefficients
    }

    /// Multiplies every coefficient by `k ≠ 0`.
    pub fn scaled(&self, k: &BigInt) -> Self {
        assert!(!k.is_zero(), "scaling by zero");
        let m = ExponentVector::zqn(0, 0, 0);
        Self {
            coefficients: self.coefficients.iter().map(|c| c.monomial_scale(&m, k)).collect(),
        }
    }

    /// `c_i(z, q, q^n)` as an arity-2 polynomial.
    pub fn coefficient_at(&self, i: usize, n: i64) -> LaurentPolynomial {
        self.coefficients[i].collapse_q_power(n).expect("arity 3")
    }

    fn leading(&self) -> (usize, &ExponentVector, &BigInt) {
        let (i, c) = self
            .coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .expect("c_0 is nonzero");
        let (e, v) = c.terms().next().expect("nonzero");
        (i, e, v)
    }

    /// Whether `self = λ·q^k·other` for some rational `λ ≠ 0`; returns `k`.
    pub fn proportional_up_to_q_shift(&self, other: &CandidateRecurrence) -> Option<i64> {
        if self.order() != other.order() {
            return None;
        }
        let (i, e1, v1) = self.leading();
        let (j, e2, v2) = other.leading();
        if i != j || e1.z() != e2.z() || e1.components()[2] != e2.components()[2] {
            return None;
        }
        let k = e1.q() - e2.q();
        let shift = ExponentVector::zqn(0, k, 0);
        // v2·self == v1·q^k·other
        let same = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .all(|(a, b)| a.monomial_scale(&ExponentVector::zqn(0, 0, 0), v2) == b.monomial_scale(&shift, v1));
        same.then_some(k)
    }

    pub fn is_proportional_to(&self, other: &CandidateRecurrence) -> bool {
        self.proportional_up_to_q_shift(other) == Some(0)
    }
}

impl fmt::Display for CandidateRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order {}", self.order())?;
        for (i, c) in self.coefficients.iter().enumerate() {
            writeln!(f, "c{i} = {c}")?;
        }
        Ok(())
    }
}

impl Serialize for CandidateRecurrence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CandidateRecurrence", 2)?;
        st.serialize_field("order", &self.order())?;
        let texts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coefficients", &texts)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    /// First `n` where the relation does not vanish, with the residual.
    Fail { n: usize, residual: LaurentPolynomial },
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        *self == CheckOutcome::Pass
    }
}

fn residual(seq: &[LaurentPolynomial], cand: &CandidateRecurrence, n: usize) -> LaurentPolynomial {
    let mut acc = LaurentPolynomial::zero(2);
    for i in 0..=cand.order() {
        if !cand.coefficients[i].is_zero() {
            acc = &acc + &(&cand.coefficient_at(i, n as i64) * &seq[n - i]);
        }
    }
    acc
}

/// Exact check of the relation for every `n` in `range`.
pub fn verify_candidate(
    seq: &[LaurentPolynomial],
    cand: &CandidateRecurrence,
    range: RangeInclusive<usize>,
) -> Result<CheckOutcome> {
    if *range.start() < cand.order() {
        return Err(Error::InvalidRange(format!(
            "range starts at {} but the order is {}",
            range.start(),
            cand.order()
        )));
    }
    if *range.end() >= seq.len() {
        return Err(Error::SequenceTooShort {
            needed: *range.end(),
            have: seq.len(),
        });
    }
    for n in range {
        let r = residual(seq, cand, n);
        if !r.is_zero() {
            return Ok(CheckOutcome::Fail { n, residual: r });
        }
    }
    Ok(CheckOutcome::Pass)
}

/// The rational solution space of the linear system for one ansatz.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nullspace {
    /// Unknown `k` is the coefficient of `columns[k].1` in `c_{columns[k].0}`.
    pub columns: Vec<(usize, ExponentVector)>,
    /// Basis in reduced form: vector `k` is `1` at `free[k]` and `0` at
    /// every other free column.
    pub free: Vec<usize>,
    pub basis: Vec<Vec<RationalValue>>,
}

impl Nullspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Unknown vector of a recurrence, if it fits the column set.
    pub fn coordinates_of(&self, cand: &CandidateRecurrence) -> Option<Vec<RationalValue>> {
        let index: HashMap<(usize, ExponentVector), usize> =
            self.columns.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let mut v = vec![RationalValue::zero(); self.columns.len()];
        for (i, c) in cand.coefficients.iter().enumerate() {
            for (e, coeff) in c.terms() {
                let k = *index.get(&(i, *e))?;
                v[k] = RationalValue::from(coeff.clone());
            }
        }
        Some(v)
    }

    /// Whether `cand` lies in the solution space.
    pub fn contains(&self, cand: &CandidateRecurrence) -> bool {
        let Some(v) = self.coordinates_of(cand) else {
            return false;
        };
        // in reduced form, v is in the span iff v = Σ v[free_k]·basis_k
        let mut combo = vec![RationalValue::zero(); v.len()];
        for (k, b) in self.basis.iter().enumerate() {
            let w = &v[self.free[k]];
            if w.is_zero() {
                continue;
            }
            for (x, y) in combo.iter_mut().zip(b) {
                *x += w * y;
            }
        }
        combo == v
    }

    fn candidate(&self, v: &[RationalValue], order: usize) -> CandidateRecurrence {
        let ints = linalg::primitive_integer_vector(v);
        let mut per_lag: Vec<Vec<(ExponentVector, BigInt)>> = vec![Vec::new(); order + 1];
        for (k, c) in ints.into_iter().enumerate() {
            if !c.is_zero() {
                let (i, e) = self.columns[k];
                per_lag[i].push((e, c));
            }
        }
        CandidateRecurrence {
            coefficients: per_lag
                .into_iter()
                .map(|t| LaurentPolynomial::from_terms(3, t).expect("arity 3"))
                .collect(),
        }
    }

    /// Basis recast as forward-solvable candidates: vectors with `c_0 = 0`
    /// are combined with one that has `c_0 ≠ 0`. Empty if no solution
    /// has `c_0 ≠ 0`.
    pub fn candidates(&self, order: usize) -> Vec<CandidateRecurrence> {
        let c0_nonzero = |v: &Vec<RationalValue>| self.columns.iter().zip(v).any(|((i, _), x)| *i == 0 && !x.is_zero());
        let Some(anchor) = self.basis.iter().find(|v| c0_nonzero(v)).cloned() else {
            return Vec::new();
        };
        self.basis
            .iter()
            .map(|v| {
                let v = if c0_nonzero(v) {
                    v.clone()
                } else {
                    v.iter().zip(&anchor).map(|(a, b)| a + b).collect()
                };
                let mut cand = self.candidate(&v, order);
                // primitive vectors start positive; make c_0's leading entry positive
                if cand.coefficients[0].terms().next().map(|(_, c)| c.is_negative()) == Some(true) {
                    cand = cand.scaled(&-BigInt::one());
                }
                cand
            })
            .collect()
    }
}

/// Residues of `P_m` modulo `p`, per term.
struct ModularSequence {
    terms: Vec<Vec<(i64, i64, u64)>>,
    q_min: i64,
    q_max: i64,
    z_min: i64,
    z_max: i64,
}

impl ModularSequence {
    fn new(seq: &[LaurentPolynomial], p: u64) -> Self {
        let (mut q_min, mut q_max, mut z_min, mut z_max) = (0, 0, 0, 0);
        let terms = seq
            .iter()
            .map(|poly| {
                poly.terms()
                    .map(|(e, c)| {
                        q_min = q_min.min(e.q());
                        q_max = q_max.max(e.q());
                        z_min = z_min.min(e.z());
                        z_max = z_max.max(e.z());
                        (e.z(), e.q(), linalg::big_mod(c, p))
                    })
                    .collect()
            })
            .collect();
        Self {
            terms,
            q_min,
            q_max,
            z_min,
            z_max,
        }
    }
}

/// Powers `x^lo..=x^hi` modulo `p` (`x` nonzero).
struct PowerTable {
    lo: i64,
    values: Vec<u64>,
}

impl PowerTable {
    fn new(x: u64, lo: i64, hi: i64, p: u64) -> Self {
        let inv = linalg::inv_mod(x, p);
        let mut values = Vec::with_capacity((hi - lo + 1) as usize);
        let mut v = if lo < 0 {
            linalg::pow_mod(inv, (-lo) as u64, p)
        } else {
            linalg::pow_mod(x, lo as u64, p)
        };
        for _ in lo..=hi {
            values.push(v);
            v = linalg::mul_mod(v, x, p);
        }
        Self { lo, values }
    }

    fn get(&self, e: i64) -> u64 {
        self.values[(e - self.lo) as usize]
    }
}

fn check_inputs(seq: &[LaurentPolynomial], ansatz: &AnsatzSpec, fit: &RangeInclusive<usize>) -> Result<()> {
    if seq.iter().all(LaurentPolynomial::is_zero) {
        return Err(Error::Degenerate("all-zero sequence".into()));
    }
    if let Some(p) = seq.iter().find(|p| p.arity() != 2) {
        return Err(Error::ArityMismatch { left: 2, right: p.arity() });
    }
    if fit.is_empty() || *fit.start() < ansatz.order {
        return Err(Error::InvalidRange(format!(
            "fit range {fit:?} must be nonempty and start at or above the order {}",
            ansatz.order
        )));
    }
    if *fit.end() >= seq.len() {
        return Err(Error::SequenceTooShort {
            needed: *fit.end(),
            have: seq.len(),
        });
    }
    // every monomial of P_n gives at least one equation
    let equations: usize = fit.clone().map(|n| seq[n].len().max(1)).sum();
    if equations < ansatz.unknowns() + ansatz.order {
        return Err(Error::Degenerate(format!(
            "fit range gives about {equations} equations for {} unknowns",
            ansatz.unknowns()
        )));
    }
    Ok(())
}

/// Random evaluation rows of the system modulo `p`.
fn evaluation_rows(
    seq: &ModularSequence,
    ansatz: &AnsatzSpec,
    columns: &[(usize, ExponentVector)],
    fit: &RangeInclusive<usize>,
    rows_wanted: usize,
    p: u64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<u64>> {
    let ns: Vec<usize> = fit.clone().collect();
    let (b_lo, b_hi) = ansatz.q_degree_range;
    let z_lo = ansatz.z_exponents.first().copied().unwrap_or(0);
    let z_hi = ansatz.z_exponents.last().copied().unwrap_or(0);
    let q_n_max = ansatz.q_n_degree as i64 * *fit.end() as i64;
    let mut rows = Vec::with_capacity(rows_wanted);
    for k in 0..rows_wanted {
        let n = ns[k % ns.len()];
        let z0 = rng.random_range(2..p);
        let q0 = rng.random_range(2..p);
        let zp = PowerTable::new(z0, seq.z_min.min(z_lo), seq.z_max.max(z_hi), p);
        let qp = PowerTable::new(q0, seq.q_min.min(b_lo), seq.q_max.max(b_hi + q_n_max), p);
        let values: Vec<u64> = (0..=ansatz.order)
            .map(|i| {
                seq.terms[n - i].iter().fold(0u64, |acc, &(a, b, c)| {
                    (acc + linalg::mul_mod(c, linalg::mul_mod(zp.get(a), qp.get(b), p), p)) % p
                })
            })
            .collect();
        let row = columns
            .iter()
            .map(|(i, e)| {
                let comps = e.components();
                let mono = linalg::mul_mod(zp.get(comps[0]), qp.get(comps[1] + comps[2] * n as i64), p);
                linalg::mul_mod(mono, values[*i], p)
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// The full rational nullspace of the ansatz system on `fit`.
pub fn nullspace(seq: &[LaurentPolynomial], ansatz: &AnsatzSpec, fit: RangeInclusive<usize>) -> Result<Nullspace> {
    check_inputs(seq, ansatz, &fit)?;
    let basis = ansatz.basis();
    let columns: Vec<(usize, ExponentVector)> =
        (0..=ansatz.order).flat_map(|i| basis.iter().map(move |e| (i, *e))).collect();
    let cols = columns.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rows_wanted = cols + EXTRA_ROWS;
    for _round in 0..MAX_ROUNDS {
        // residues of the reduced basis across primes, keyed by free column set
        let mut free: Option<Vec<usize>> = None;
        let mut modulus = BigInt::one();
        let mut residues: Vec<Vec<BigInt>> = Vec::new();
        for k in 0..MAX_PRIMES {
            let p = linalg::large_prime(k);
            let mseq = ModularSequence::new(seq, p);
            let mut rows = evaluation_rows(&mseq, ansatz, &columns, &fit, rows_wanted, p, &mut rng);
            let pivots = linalg::rref_mod(&mut rows, cols, p);
            let (f, vecs) = linalg::nullspace_from_rref(&rows, &pivots, cols, p);
            match &free {
                None => {
                    free = Some(f);
                    residues = vecs.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
                }
                Some(prev) if *prev == f => {
                    for (acc, v) in residues.iter_mut().zip(&vecs) {
                        for (a, &b) in acc.iter_mut().zip(v) {
                            *a = linalg::crt(a, &modulus, b, p);
                        }
                    }
                }
                // unlucky prime or point set; skip it
                Some(_) => continue,
            }
            modulus *= BigInt::from(p);
            let free_cols = free.clone().expect("set above");
            if free_cols.is_empty() {
                return Ok(Nullspace {
                    columns,
                    free: free_cols,
                    basis: Vec::new(),
                });
            }
            let lifted: Option<Vec<Vec<RationalValue>>> = residues
                .iter()
                .map(|v| v.iter().map(|a| linalg::rational_reconstruct(a, &modulus)).collect())
                .collect();
            let Some(lifted) = lifted else { continue };
            let space = Nullspace {
                columns: columns.clone(),
                free: free_cols,
                basis: lifted,
            };
            let all_exact = space.basis.iter().all(|v| {
                let cand = space.candidate(v, ansatz.order);
                fit.clone().all(|n| residual(seq, &cand, n).is_zero())
            });
            if all_exact {
                return Ok(space);
            }
        }
        rows_wanted *= 2;
    }
    Err(Error::Degenerate(
        "could not lift the modular nullspace to exact solutions".into(),
    ))
}

/// Nullspace basis of the ansatz system on `fit`, as normalized
/// candidates; empty when only the trivial solution exists.
pub fn guess_recurrence(
    seq: &[LaurentPolynomial],
    ansatz: &AnsatzSpec,
    fit: RangeInclusive<usize>,
) -> Result<Vec<CandidateRecurrence>> {
    Ok(nullspace(seq, ansatz, fit)?.candidates(ansatz.order))
}

/// Which side of an identity supplies the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceSource {
    Lhs,
    Rhs,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub identity: IdentityId,
    pub source: SequenceSource,
    pub ansatz: AnsatzSpec,
    pub fit: (usize, usize),
    pub holdout: (usize, usize),
    pub nullspace_dimension: usize,
    pub candidates: Vec<CandidateRecurrence>,
    /// Candidates that also hold on the holdout range.
    pub survivors: Vec<CandidateRecurrence>,
    /// `(candidate index, first failing n)` for the rest.
    pub rejected: Vec<(usize, usize)>,
    /// Whether the known recurrence lies in the solution space.
    pub contains_known: bool,
}

impl CertifyReport {
    pub fn has_survivor(&self) -> bool {
        !self.survivors.is_empty()
    }
}

/// Guesses on `fit`, then checks every candidate exactly on `holdout`.
pub fn certify(
    id: IdentityId,
    source: SequenceSource,
    ansatz: &AnsatzSpec,
    fit: RangeInclusive<usize>,
    holdout: RangeInclusive<usize>,
) -> Result<CertifyReport> {
    if holdout.is_empty() || *holdout.start() <= *fit.end() {
        return Err(Error::InvalidRange(format!(
            "holdout {holdout:?} must be nonempty and lie beyond fit {fit:?}"
        )));
    }
    let mut builder = SideBuilder::new(id)?;
    let seq = match source {
        SequenceSource::Lhs => builder.lhs_sequence(*holdout.end() as u32),
        SequenceSource::Rhs => builder.rhs_sequence(*holdout.end() as u32),
    };
    certify_sequence(id, source, &seq, ansatz, fit, holdout)
}

/// [`certify`] on a precomputed sequence covering the holdout range.
pub fn certify_sequence(
    id: IdentityId,
    source: SequenceSource,
    seq: &[LaurentPolynomial],
    ansatz: &AnsatzSpec,
    fit: RangeInclusive<usize>,
    holdout: RangeInclusive<usize>,
) -> Result<CertifyReport> {
    if holdout.is_empty() || *holdout.start() <= *fit.end() {
        return Err(Error::InvalidRange(format!(
            "holdout {holdout:?} must be nonempty and lie beyond fit {fit:?}"
        )));
    }
    let space = nullspace(seq, ansatz, fit.clone())?;
    let candidates = space.candidates(ansatz.order);
    let mut survivors = Vec::new();
    let mut rejected = Vec::new();
    for (k, cand) in candidates.iter().enumerate() {
        match verify_candidate(seq, cand, holdout.clone())? {
            CheckOutcome::Pass => survivors.push(cand.clone()),
            CheckOutcome::Fail { n, .. } => rejected.push((k, n)),
        }
    }
    let contains_known = match recurrence_spec(id) {
        Ok(spec) if spec.order == ansatz.order => space.contains(&CandidateRecurrence::from_recurrence_spec(&spec)),
        _ => false,
    };
    Ok(CertifyReport {
        identity: id,
        source,
        ansatz: ansatz.clone(),
        fit: (*fit.start(), *fit.end()),
        holdout: (*holdout.start(), *holdout.end()),
        nullspace_dimension: space.dimension(),
        candidates,
        survivors,
        rejected,
        contains_known,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zq(terms: &[(i64, i64, i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(2, terms.iter().map(|&(z, q, c)| (ExponentVector::zq(z, q), c))).unwrap()
    }

    fn zqn(terms: &[(i64, i64, i64, i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(3, terms.iter().map(|&(z, q, e, c)| (ExponentVector::zqn(z, q, e), c))).unwrap()
    }

    #[test]
    fn constant_sequence() {
        let seq = vec![LaurentPolynomial::one(2); 41];
        let cand = CandidateRecurrence::new(vec![zqn(&[(0, 0, 0, 1)]), zqn(&[(0, 0, 0, -1)])]).unwrap();
        assert!(verify_candidate(&seq, &cand, 1..=40).unwrap().passed());
        assert!(verify_candidate(&seq, &cand, 0..=40).is_err());
        assert!(verify_candidate(&seq, &cand, 1..=41).is_err());
    }

    #[test]
    fn geometric_sequence() {
        let seq: Vec<LaurentPolynomial> = (0..30).map(|n| zq(&[(0, n, 1)])).collect();
        let ansatz = AnsatzSpec::new(1, 1, (0, 1), [0]).unwrap();
        let cands = guess_recurrence(&seq, &ansatz, 1..=20).unwrap();
        assert!(!cands.is_empty());
        let target = CandidateRecurrence::new(vec![zqn(&[(0, 0, 0, 1)]), zqn(&[(0, 1, 0, -1)])]).unwrap();
        let space = nullspace(&seq, &ansatz, 1..=20).unwrap();
        assert!(space.contains(&target));
        for c in &cands {
            assert!(verify_candidate(&seq, c, 1..=29).unwrap().passed());
        }
    }

    #[test]
    fn zero_sequence_rejected() {
        let seq = vec![LaurentPolynomial::zero(2); 10];
        let ansatz = AnsatzSpec::new(1, 0, (0, 0), [0]).unwrap();
        assert!(matches!(guess_recurrence(&seq, &ansatz, 1..=9), Err(Error::Degenerate(_))));
    }

    #[test]
    fn corrupted_known_recurrence_fails_at_first_index() {
        let seq = SideBuilder::new(IdentityId::R1Finite).unwrap().lhs_sequence(12);
        let spec = recurrence_spec(IdentityId::R1Finite).unwrap();
        let good = CandidateRecurrence::from_recurrence_spec(&spec);
        assert!(verify_candidate(&seq, &good, 4..=12).unwrap().passed());
        let mut coeffs = good.coefficients().to_vec();
        coeffs[1] = -&zqn(&[(0, 0, 0, 1), (0, 1, 0, -1)]);
        let bad = CandidateRecurrence::new(coeffs).unwrap();
        assert!(matches!(verify_candidate(&seq, &bad, 4..=12).unwrap(), CheckOutcome::Fail { n: 4, .. }));
    }

    #[test]
    fn proportionality() {
        let spec = recurrence_spec(IdentityId::R2Finite).unwrap();
        let a = CandidateRecurrence::from_recurrence_spec(&spec);
        let b = a.scaled(&BigInt::from(-3));
        assert!(a.is_proportional_to(&b));
        let shift = ExponentVector::zqn(0, 2, 0);
        let c = CandidateRecurrence::new(a.coefficients().iter().map(|x| x.monomial_scale(&shift, &BigInt::one())).collect()).unwrap();
        assert_eq!(c.proportional_up_to_q_shift(&a), Some(2));
        assert!(!c.is_proportional_to(&a));
    }
}
