use thiserror::Error;

/// Errors shared across the crate.
///
/// Exceeding a guard or budget is an error; a computation never silently
/// degrades into an approximation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(usize),
    #[error("field too large: p^k = {0} exceeds the supported maximum {1}")]
    FieldTooLarge(u128, u128),
    #[error("elements belong to different fields (q = {0} vs q = {1})")]
    MismatchedFields(u64, u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("no embedding GF({src_p}^{src_k}) -> GF({dst_p}^{dst_k}): {reason}")]
    BadEmbedding {
        src_p: u64,
        src_k: usize,
        dst_p: u64,
        dst_k: usize,
        reason: &'static str,
    },
    #[error("invalid element encoding {0} for field of size {1}")]
    BadEncoding(u64, u64),
    #[error("coefficient vector has length {got}, field has degree {want}")]
    BadCoeffLength { got: usize, want: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("point budget exceeded: {points} points > budget {budget}")]
    BudgetExceeded { points: u128, budget: u128 },
    #[error("estimate inconclusive: ratio residual {residual} >= 0.5")]
    Inconclusive { residual: f64 },
    #[error("certificate failed re-verification: {0}")]
    VerificationFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
