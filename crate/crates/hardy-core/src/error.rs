use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value would overflow double precision.
    #[error("overflow: {0}")]
    Overflow(String),

    /// An integral fails its integrability test; names the offending endpoint.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// A supremum grows without bound over its search range.
    #[error("unbounded norm: {0}")]
    Unbounded(String),

    /// A dyadic tail of a Herz-type sum cannot be certified geometric.
    #[error("non-power tail: {0}")]
    NonPowerTail(String),

    /// Theorem admissibility constraints violated; lists every failure.
    #[error("constraint violations: {}", .0.join("; "))]
    ConstraintViolation(Vec<String>),

    /// A named parameter required by a theorem was not supplied.
    #[error("missing parameter: {0}")]
    MissingParameter(String),

    /// Epsilon outside the range admitted by the extremal family.
    #[error("epsilon out of range: {0}")]
    EpsilonRange(String),

    /// No extremal family is known for this bound.
    #[error("no extremal family available: {0}")]
    FamilyUnavailable(String),

    /// The m-linear operator is only applied for m in {1, 2}.
    #[error("unsupported multilinearity m={0}; application requires m in {{1, 2}}")]
    UnsupportedM(usize),

    /// Ratio measurement against a function with zero source norm.
    #[error("zero source norm")]
    ZeroSource,

    /// Malformed serialized profile or configuration.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
