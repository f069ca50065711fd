use thiserror::Error;

use crate::identities::IdentityId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("unsupported arity {0} (expected 1..=3)")]
    InvalidArity(usize),

    #[error("operation `{op}` needs arity at least {needed}, polynomial has arity {got}")]
    ArityTooSmall {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("q-power substitution needs a positive exponent, got {0}")]
    NonPositivePower(i64),

    #[error("evaluation point has {got} coordinates, polynomial arity is {expected}")]
    PointArity { expected: usize, got: usize },

    #[error("coordinate {index} is zero but a negative exponent is present")]
    ZeroCoordinate { index: usize },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("`{op}` is not defined for {id}")]
    Unsupported { op: &'static str, id: IdentityId },

    #[error("infinite product factor must have q-exponent >= 1, got {0}")]
    NonPositiveFactor(i64),

    #[error("series is not invertible: constant term is not exactly 1")]
    NotInvertible,

    #[error("sequence too short: need index {needed}, have {have} terms")]
    SequenceTooShort { needed: usize, have: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("malformed term list: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
