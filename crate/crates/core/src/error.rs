use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph has no edges left")]
    EmptyGraph,
    #[error("node {0} is isolated")]
    IsolatedNode(usize),
    #[error("edge ({0}, {1}) is not present")]
    EdgeNotPresent(usize, usize),
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("resampling budget exhausted after {0} attempts")]
    ResamplingExhausted(usize),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("reference matching is not maximum: {0}")]
    NotMaximum(String),
    #[error("non-canonical input: {0}")]
    NonCanonical(String),
    #[error("trace does not match graph: {0}")]
    TraceMismatch(String),
    #[error("execution limit {0} exceeded")]
    ExecutionLimit(usize),
    #[error("strategy is not greedy")]
    NonGreedyStrategy,
    #[error("adversary inconsistency: {0}")]
    AdversaryInconsistency(String),
    #[error("illegal decision: {0}")]
    IllegalDecision(String),
    #[error("inconsistent transcript: {0}")]
    InconsistentTranscript(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
