use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("capacity exceeded: {what} needs {needed}, limit {limit}")]
    CapacityExceeded { what: String, needed: u128, limit: u128 },
    #[error("field {0} is infinite; a finite field is required")]
    InfiniteFieldUnsupported(String),
    #[error("torsion element found: {0}")]
    TorsionDetected(String),
    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    SyntaxError { line: usize, col: usize, expected: String },
    #[error("unknown symbol `{name}` at line {line}, column {col}")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("literal `{literal}` out of range for {field} at line {line}, column {col}")]
    FieldLiteralOutOfRange { line: usize, col: usize, literal: String, field: String },
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("product overflows the truncated carrier and no truncation context was given")]
    TruncationRequired,
    #[error("unsupported coefficient algebra: {0}")]
    UnsupportedCoefficientAlgebra(String),
    #[error("carrier is infinite: {0}")]
    InfiniteCarrier(String),
    #[error("no monomials under degree bound {0}")]
    EmptyWindow(usize),
    #[error("carrier is not a domain: zero divisors {0} and {1}")]
    NotADomain(String, String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("basis is linearly dependent")]
    DependentBasis,
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("no anchor up to degree {cap} gives a nonzero product")]
    AnchorDegenerate { cap: usize },
    #[error("point outside the parallelepipedon: {0}")]
    PointOutsidePolytope(String),
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn capacity(what: impl Into<String>, needed: u128, limit: u128) -> Error {
        Error::CapacityExceeded { what: what.into(), needed, limit }
    }
}
