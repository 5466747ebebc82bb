use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain must contain at least one point")]
    EmptyDomain,

    #[error("duplicate point identifier `{0}`")]
    DuplicatePoint(String),

    #[error("operands live on different domains")]
    DomainMismatch,

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at point index {index}")]
    NonFiniteValue { index: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("measurement space `{0}` is empty")]
    EmptySpace(String),

    #[error("point index {index} out of range for a domain of {size} points")]
    PointOutOfRange { index: usize, size: usize },

    #[error("tabulated map has no image for member {member}")]
    UndefinedImage { member: usize },

    #[error("perception triples do not match: {0}")]
    TripleMismatch(String),

    #[error("transformation map mismatch: {0}")]
    TransformationMismatch(String),

    #[error("operator is not certified: {0}")]
    Uncertified(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid aggregator: {0}")]
    InvalidAggregator(String),

    #[error("aggregator failed the non-expansiveness audit (excess {excess:e})")]
    AuditFailed { excess: f64 },

    #[error("weighted sum left the target space for {} member(s)", .0.len())]
    ConvexityFailure(Vec<crate::pgeneo::CodomainFailure>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot cover an empty collection")]
    EmptyCollection,

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("distance oracle is not a pseudo-metric: {0}")]
    NotPseudoMetric(String),

    #[error("{field}: {message}")]
    Instance { field: String, message: String },
}

impl Error {
    pub(crate) fn instance(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Instance {
            field: field.into(),
            message: message.into(),
        }
    }
}
