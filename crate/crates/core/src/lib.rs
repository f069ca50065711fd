//! Exact symbolic verification of finite two-variable Rogers–Ramanujan
//! type identities.
//!
//! Polynomials in `z` and `q` (optionally with a third variable standing for
//! `q^n`) are held exactly with arbitrary-precision integer coefficients. On
//! top of that the crate provides q-binomial building blocks, both sides of
//! each identity, the recurrences that characterize them, truncated power
//! series for the `n → ∞` limits, and a recurrence guesser based on exact
//! linear algebra.

mod dense;
pub mod error;
pub mod guess;
pub mod identities;
pub mod laurent;
mod linalg;
pub mod qcomb;
pub mod series;

pub use error::{Error, Result};
pub use identities::{IdentityId, RecurrenceSpec, SideBuilder, Status, VerificationReport};
pub use laurent::{ExponentVector, LaurentPolynomial, RationalValue, Valuation};
pub use qcomb::QBinomialArgs;
