use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: input problems (bad polynomial text,
/// out-of-range parameters, undefined quantities) and computational limits
/// (budget and precision caps). The CLI maps the first family to exit code 2
/// and the second to exit code 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero polynomial has no decomposition")]
    ZeroPolynomial,
    #[error("discriminant undefined")]
    DiscriminantUndefined,
    #[error("valuation of zero is infinite")]
    ValuationOfZero,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("precision cap exceeded")]
    PrecisionCapExceeded,
    #[error("u_p infinite: polynomial has a p-adic root")]
    UpInfinite,
    #[error("lambda_p undefined without roots")]
    LambdaUndefined,
    #[error("oracle budget exceeded")]
    OracleBudgetExceeded,
    #[error("boundary tie unresolved")]
    BoundaryTieUnresolved,
    #[error("c(Σ) defined only for s ≥ 2")]
    CSigmaNeedsTwo,
    #[error("exact asymptotics requires s′ ≥ 2")]
    ExactAsymptoticsNeedsTwo,
    #[error("multiple root in Z_{0}: the exact constant needs simple roots")]
    MultipleRoot(u64),
    #[error("finite count regime")]
    FiniteCountRegime,
    #[error("no closed envelope: {0}")]
    EnvelopeUnavailable(String),
    #[error("invalid epsilon: {0}")]
    InvalidEpsilon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for budget/precision caps, false for malformed or out-of-domain input.
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            Error::PrecisionCapExceeded | Error::OracleBudgetExceeded | Error::BoundaryTieUnresolved
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
