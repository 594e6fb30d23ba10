use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the engine can report.
///
/// Variants split into input problems ([`Error::is_input_error`]) and numeric
/// failures; the command line maps them to different exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("non-finite value at row {row}")]
    NonFiniteValue { row: usize },
    #[error("ids do not form a bijection: {0}")]
    MismatchedIds(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("too few rows: need at least {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("too few models: need at least 2, got {0}")]
    TooFewModels(usize),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("concept marginal is not uniform (max deviation {0:e})")]
    NonUniformConcept(f64),
    #[error("no common ids between inputs")]
    NoCommonIds,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("every row has zero norm")]
    AllZeroRows,
    #[error("insufficient samples: {samples} rows for {dims} joint dimensions")]
    InsufficientSamples { samples: usize, dims: usize },
    #[error("covariance matrix is singular")]
    SingularCovariance,
    #[error("marginal entropy is zero")]
    ZeroMarginalEntropy,
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by the
    /// arithmetic.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::SingularCovariance | Error::ZeroMarginalEntropy | Error::Numeric(_)
        )
    }
}
