use thiserror::Error;

use crate::algebra::RingKind;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not a unit")]
    NotAUnit(u64),
    #[error("operation requires {expected}, got {found:?}")]
    WrongKind {
        expected: &'static str,
        found: RingKind,
    },
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("degree {degree} is not below the ring order {order}")]
    DegreeTooLarge { degree: u32, order: u32 },
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("polynomial is degenerate (of the form Q(L))")]
    DegenerateInput,
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("{what} of size {size} exceeds the cap {cap}")]
    TooLarge { what: &'static str, size: u64, cap: u64 },
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("modulus {0} is even")]
    EvenModulus(u64),
    #[error("polynomial has a linear factor")]
    LinearFactorPresent,
    #[error("frequency must be nonzero")]
    ZeroFrequency,
    #[error("quadratic form is not equivalent to a diagonal form with unit coefficients")]
    NotInOmega,
    #[error("polynomial is not symmetric under x -> -x")]
    NotSymmetric,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("corpus entry {0} is outside the nontrivial regime")]
    OutOfRegime(usize),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_cap(what: &'static str, size: u64, cap: u64) -> Result<()> {
    if size > cap {
        Err(Error::TooLarge { what, size, cap })
    } else {
        Ok(())
    }
}
