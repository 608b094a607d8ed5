use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmcError {
    /// A base that must be prime is not.
    #[error("base {0} is not prime")]
    InvalidBase(u32),
    /// The base vector is empty or its entries are not pairwise distinct primes.
    #[error("bases must be non-empty, pairwise distinct primes: {0:?}")]
    InvalidBases(Vec<u32>),
    /// Two operands that must share base/precision do not.
    #[error("incompatible operands: {0}")]
    IncompatibleOperands(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// An argument is outside the documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A quadrature or truncation resolution does not satisfy its divisibility
    /// or size constraints.
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// Two routes that must agree numerically disagree beyond tolerance, or a
    /// quantity that must be nonnegative came out clearly negative.
    #[error("numerical consistency failure: {0}")]
    NumericalConsistency(String),
    /// Exact integer bookkeeping would overflow 128 bits.
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, QmcError>;
