//! Shared fixtures for the criterion benchmarks.

use qfin::identities::{IdentityId, SideBuilder};
use qfin::LaurentPolynomial;

/// `P_0..=P_{n_max}` for a finite identity, from the defining sum.
pub fn lhs_sequence(id: IdentityId, n_max: u32) -> Vec<LaurentPolynomial> {
    SideBuilder::new(id).expect("finite identity").lhs_sequence(n_max)
}
