use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge ({i}, {j}, {weight}): {reason}")]
    InvalidEdge {
        i: usize,
        j: usize,
        weight: f64,
        reason: &'static str,
    },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("seed set is empty")]
    EmptySeed,

    #[error("seed set covers every vertex")]
    FullSeed,

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("retained eigenpair count {k} must be in 1..={n}")]
    InvalidRetainedCount { k: usize, n: usize },

    #[error("operation requires the full eigenbasis (have {k} of {n} eigenpairs)")]
    TruncatedBasis { k: usize, n: usize },

    #[error("eigenbasis is over the {found} but the {expected} is required")]
    WrongOperator {
        expected: &'static str,
        found: &'static str,
    },

    #[error("gamma {gamma} must be strictly below the second eigenvalue {lambda2}")]
    GammaOutOfRange { gamma: f64, lambda2: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("window at vertex {0} is identically zero after positive truncation")]
    DegenerateWindow(usize),

    #[error("frequency index {k} out of range (retained {retained})")]
    FrequencyOutOfRange { k: usize, retained: usize },

    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("spectral signature of vertex {0} has zero variance")]
    ZeroVarianceSignature(usize),

    #[error("({0}, {1}) is not an edge of the ring")]
    NotARingEdge(usize, usize),

    #[error("points {0} and {1} have identical coordinates")]
    DuplicatePoints(usize, usize),

    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("dataset has no usable rows")]
    EmptyDataset,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigenbasis cache: {0}")]
    CacheFormat(String),

    #[error("eigenbasis cache was computed for a different graph")]
    StaleCache,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used by front-ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::VertexOutOfRange { .. }
            | Error::InvalidRetainedCount { .. }
            | Error::FrequencyOutOfRange { .. }
            | Error::InvalidParameter(_)
            | Error::EmptySeed
            | Error::FullSeed => ErrorClass::Usage,
            Error::NotSymmetric { .. }
            | Error::ConvergenceFailure(_)
            | Error::GammaOutOfRange { .. }
            | Error::DegenerateWindow(_)
            | Error::ZeroVarianceSignature(_)
            | Error::PreconditionViolated(_) => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }
}
