use thiserror::Error;

use crate::euler_characteristic::HypothesisReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular model: discriminant is zero")]
    SingularModel,
    #[error("cannot parse {0:?} as a rational number")]
    NonRational(String),
    #[error("model is not integral at {0}")]
    NotIntegralAt(String),
    #[error("prime {0} exceeds the point-counting limit of 10^9")]
    PrimeTooLarge(String),
    #[error("reduced curve is singular")]
    SingularCurve,
    #[error("unsupported prime: {0}")]
    UnsupportedPrime(String),
    #[error("p must be an odd prime, got {0}")]
    EvenOrCompositeP(String),
    #[error("sign vector has length {got}, expected {expected} (one sign per supersingular prime)")]
    SignLengthMismatch { expected: usize, got: usize },
    #[error("cannot parse sign vector {0:?}: use only '+' and '-'")]
    BadSigns(String),
    #[error("hypotheses failed: {}", .0.failure_summary())]
    HypothesisFailure(Box<HypothesisReport>),
    #[error(transparent)]
    NonPPower(#[from] crate::arith::NotPPower),
    #[error("{0} supersingular primes give too many sign vectors (limit 10)")]
    TooManySigns(usize),
    #[error("no supersingular primes above p: there is only the empty sign vector")]
    NoSupersingularPrimes,
    #[error("f(0) = 0: the Gamma-invariants are infinite and the Euler characteristic is undefined")]
    NonFiniteInvariants,
    #[error("v_p(f(0)) reaches the declared precision {0}")]
    PrecisionExhausted(u32),
    #[error("power series has no nonzero coefficient")]
    ZeroSeries,
    #[error("invalid local data: {0}")]
    Schema(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
