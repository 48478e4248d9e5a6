//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by exact q-difference computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero scalar has no (epsilon, cbar) decomposition")]
    ZeroScalar,
    #[error("needed coefficient of z^{needed} but series is only known modulo z^{prec}")]
    InsufficientPrecision { needed: i64, prec: i64 },
    #[error("division by a series that is zero to precision")]
    DivisionByZeroSeries,
    #[error("q-integration requires a zero constant term")]
    NonzeroConstantTerm,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no exact q-root at ramification level {level}: the level must divide {budget}")]
    ExactRootUnavailable { level: u32, budget: u32 },
    #[error("operation undefined for the zero operator")]
    ZeroOperator,
    #[error("division by the zero operator")]
    DivisionByZeroOperator,
    #[error("characteristic polynomial does not split over the rationals; irreducible factor: {0}")]
    IrrationalExponent(String),
    #[error("internal consistency failure: nonzero residual in an exact division")]
    ResidualNonzero,
    #[error("convergent factorization is licensed only at the first slope {first}, got {got}")]
    NotFirstSlope { got: i64, first: i64 },
    #[error("constant coefficient of the operator is not a unit")]
    NonUnitConstantTerm,
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no cyclic vector could be certified at the working precision")]
    PrecisionInsufficientForRank,
    #[error("the zero element has no slope")]
    ZeroElement,
    #[error("divergent direction: theta + nu = {0} > 0 in convergent mode")]
    DivergentDirection(i64),
    #[error("not enough known coefficients: have {have}, need {need}")]
    InsufficientData { have: i64, need: i64 },
    #[error("solution basis failed verification: {0}")]
    BasisVerificationFailed(String),
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
