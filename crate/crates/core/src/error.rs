use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The CLI maps these onto exit statuses, so variants are grouped by how a
/// caller is expected to react: configuration mistakes, arithmetic domain
/// violations, broken protocol preconditions, and refusals.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is out of range (need 3 <= p < 2^63)")]
    ModulusOutOfRange(u64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("field too small: p = {p} < 4n = {bound} (use relaxed mode to allow this)")]
    FieldTooSmall { p: u64, bound: u128 },
    #[error("mismatched field parameters: {0}")]
    ParamsMismatch(String),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("value {value} is not a residue mod {p}")]
    NotAResidue { value: u64, p: u64 },
    #[error("zero coordinate at index {index} in a vector required to be nonzero")]
    ZeroCoordinate { index: usize },
    #[error("empty constraint set: no nonzero-coordinate pair has inner product {secret} with n = {n}")]
    EmptyConstraintSet { secret: u64, n: usize },
    #[error("oracle sample violates {0}")]
    InvalidOracleSample(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("restart cap of {cap} attempts exceeded")]
    RestartCapExceeded { cap: u32 },
    #[error("channel error: {0}")]
    Channel(String),
    #[error("leakage budget exceeded on part {part}: consumed {consumed} + requested {requested} > lambda {lambda}")]
    BudgetExceeded {
        part: usize,
        consumed: usize,
        requested: usize,
        lambda: usize,
    },
    #[error("malformed leakage function: {0}")]
    MalformedLeakageFunction(String),
    #[error("adversary exceeded the cap of {cap} queries")]
    QueryCapExceeded { cap: usize },
    #[error("enumeration space too large: {size} tuples exceeds limit {limit}")]
    SpaceTooLarge { size: u128, limit: u128 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
