use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("custom enumeration table exhausted at rank {0} and no extension rule given")]
    SchemeExhausted(usize),

    #[error("operation not supported for scheme {0}")]
    UnsupportedScheme(&'static str),

    #[error("polynomials have different centre or scale")]
    MismatchedBasis,

    #[error("dilation requires a polynomial centred at the origin")]
    NonzeroCenter,

    #[error("sets are not strictly separable: {0}")]
    Inseparable(String),

    #[error("rational rounding cannot keep half of the separation margin")]
    MarginLost,

    #[error("exhaustion compact at stage {stage} is empty")]
    EmptyExhaustion { stage: usize },

    #[error("separation margin relative to the centre is degenerate ({0:e})")]
    DegenerateMargin(f64),

    #[error("simplex iteration limit reached after {0} pivots")]
    IterationLimit(usize),

    #[error("degree budget {degree} exhausted: achieved {achieved:e} > tolerance {tolerance:e}")]
    BudgetExceeded {
        degree: u32,
        achieved: f64,
        tolerance: f64,
    },

    #[error("invalid approximation request: {0}")]
    InvalidRequest(String),

    #[error("series fingerprint {found} does not match scenario fingerprint {expected}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("operation requires {expected} mode")]
    ModeMismatch { expected: &'static str },

    #[error("membership check failed: {0}")]
    Membership(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
