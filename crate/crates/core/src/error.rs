use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate line: endpoints are {0:e} apart")]
    DegenerateLine(f64),

    #[error("point {index} is off the unit sphere (norm {norm})")]
    OffSphere { index: usize, norm: f64 },

    #[error("duplicate points {0} and {1}")]
    DuplicatePoints(usize, usize),

    /// A hypothesis of one of the theorems is not satisfied by the input.
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    /// A bound that the theorems guarantee failed on a run whose hypotheses
    /// were verified. Either the input bypassed a gate or there is a defect.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("decoding family search exhausted for index {index}: found {found} of {wanted} tuples")]
    SearchExhausted {
        index: usize,
        found: usize,
        wanted: usize,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::HypothesisNotMet(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
