use thiserror::Error;

/// Crate-wide error type. Mathematical verdicts ("this input is not a weak
/// multiplier bialgebra") are reported through check results, not errors;
/// errors are reserved for structural failures: malformed input, violated
/// preconditions, or internally inconsistent linear systems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse scalar `{0}`")]
    ScalarParse(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violated: {law} (witness indices {witness:?})")]
    InvariantViolation { law: String, witness: Vec<usize> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("algebra is degenerate: {0}")]
    DegenerateAlgebra(String),

    #[error("no canonical idempotent: {0}")]
    NoCanonicalIdempotent(String),

    #[error("not a multiplier of the algebra: {0}")]
    NotAMultiplier(String),

    #[error("element extraction failed: {0}")]
    ExtractionFailed(String),

    #[error("not a separability idempotent: {0}")]
    NotSeparability(String),

    #[error("restricted inverse precondition failed: {0}")]
    RestrictedInverse(String),

    #[error("inconsistent counit system: {0}")]
    InconsistentCounit(String),

    #[error("inconsistent antipode system: {0}")]
    InconsistentAntipode(String),

    #[error("antipode not bijective")]
    AntipodeNotBijective,

    #[error("antipode routes disagree: {0}")]
    AntipodeRoutesDisagree(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
