use thiserror::Error;

/// Errors shared across the library.
///
/// Preconditions are validated eagerly: every operation that consumes a graph,
/// partition, or list assignment rejects malformed input with one of these
/// variants instead of producing an unverifiable result.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid grid dimensions: {0}")]
    BadDims(String),

    #[error("invalid graph: {0}")]
    BadGraph(String),

    #[error("cycle enumeration cap exceeded: graph has {n} vertices, cap is {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("graph is not a linear forest: {0}")]
    NotLinearForest(String),

    #[error("component is not a ladder, ladder minus a corner, or path: {0}")]
    NotInFamilyG1(String),

    #[error("component is not a (possibly notched) two-dimensional grid or path: {0}")]
    NotInFamilyG2(String),

    #[error("grid is not four-dimensional after normalisation: dims {0:?}")]
    NotFourDimensional(Vec<usize>),

    #[error("grid is not two-dimensional after normalisation: dims {0:?}")]
    NotTwoDimensional(Vec<usize>),

    #[error("grid is not three-dimensional after normalisation: dims {0:?}")]
    NotThreeDimensional(Vec<usize>),

    #[error("no factor equal to two in dims {0:?}")]
    FirstFactorNotTwo(Vec<usize>),

    #[error("dims {0:?} do not match the required shape: {1}")]
    WrongShape(Vec<usize>, String),

    #[error("grid dimension {dim} is below the minimum {min} for this construction")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("edge sets do not partition the graph into two forests: {0}")]
    NotForestPartition(String),

    #[error("graph is not connected")]
    NotConnected,

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("verification failed on a constructed object: {0}")]
    VerificationFailed(String),

    #[error("cross-check discrepancy: {0}")]
    Discrepancy(String),

    #[error("i/o or serialisation error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
