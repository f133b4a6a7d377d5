use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radicand must be positive, got {0}")]
    NonPositiveRadicand(String),
    #[error("radicand {0} exceeds the supported bound")]
    RadicandTooLarge(u128),

    #[error("lattice elements belong to different groups: {0} vs {1}")]
    MixedGroups(String, String),
    #[error("{0} is not in the positive cone")]
    NotPositive(String),
    #[error("meet of {0} and {1} is not the identity")]
    NotCoprime(String, String),

    #[error("eventually periodic word needs a nonempty cycle")]
    EmptyCycle,
    #[error("invalid bit {0:?}; expected '0' or '1'")]
    InvalidBit(char),
    #[error("cannot parse point {0:?}")]
    PointSyntax(String),
    #[error("operation expects a {expected} point, got {got}")]
    WrongSpace { expected: &'static str, got: String },
    #[error("table depth {depth} exceeds cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },
    #[error("materialized value depends on the tail at cylinder {0}")]
    TailDependence(String),
    #[error("no depth bound available for this expression")]
    UnboundedDepth,

    #[error("dictionary is not progressive: prefix {0} has {1} completions")]
    NonProgressive(String, usize),
    #[error("dictionary file line {line}: {reason}")]
    DictionaryFormat { line: usize, reason: String },
    #[error("dictionary width {0} is outside the supported range")]
    WidthOutOfRange(usize),
    #[error("generators do not commute at {0}")]
    NonCommuting(String),
    #[error("pair is not star-commuting: {0}")]
    NotStarCommuting(String),
    #[error("admissibility fails: {0}")]
    AdmissibilityViolated(String),

    #[error("elements are not composable: {0} != {1}")]
    NotComposable(String, String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("operation not supported by this action: {0}")]
    Unsupported(String),

    #[error("expression syntax: {0}")]
    ExprSyntax(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
