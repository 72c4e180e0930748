use num_rational::BigRational;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed element encoding `{encoding}` for group {group}: {reason}")]
    Encoding {
        group: String,
        encoding: String,
        reason: String,
    },

    #[error("invalid group descriptor: {0}")]
    Descriptor(String),

    #[error("duplicate element {0} in a finite subset")]
    DuplicateElement(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),

    #[error("invariance target unreachable at level {level}: best defect {achieved} exceeds {target}")]
    InvarianceUnreachable {
        level: usize,
        achieved: Box<BigRational>,
        target: Box<BigRational>,
    },

    #[error("exact sequence data inconsistent: {0}")]
    ExactSequence(String),

    #[error("coset representatives do not represent distinct cosets: {0}")]
    NotCosetReps(String),

    #[error("block construction failed at level {level}: {reason}")]
    Construction { level: usize, reason: String },

    #[error("incidence counts infeasible: {0}")]
    Infeasible(String),

    #[error("cannot make blocks pairwise distinct: {0}")]
    Distinctness(String),

    #[error("augmentation precondition violated: {0}")]
    Augmentation(String),

    #[error("level {level} is beyond built depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("element {0} lies outside the addressed window")]
    OutOfWindow(String),

    #[error("matrix is not managed: {0}")]
    NotManaged(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("scale mismatch: {0}")]
    Scale(String),

    #[error("grouping hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no admissible grouping index after {reached} (sequence length {len})")]
    Exhausted { reached: usize, len: usize },

    #[error("rendering unsupported: {0}")]
    Render(String),

    #[error("serialization: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
