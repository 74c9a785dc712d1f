use thiserror::Error;

/// Errors produced anywhere in the graph/simplex pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("subset does not fit a graph on {expected} nodes: {message}")]
    SubsetOutOfRange { expected: usize, message: String },

    #[error("subsets overlap at node {node}")]
    Overlap { node: usize },

    #[error("node index {index} out of range for {node_count} nodes")]
    Index { index: usize, node_count: usize },

    #[error("spectral decomposition failed: {0}")]
    Spectral(String),

    #[error("embeddings come from different decompositions")]
    MismatchedSource,

    #[error("expected {expected} simplex, got {actual}")]
    WrongKind {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid barycentric coordinate: {0}")]
    Barycentric(String),

    #[error("vector is not orthogonal to the all-one vector (u^T y = {dot:e})")]
    NonOrthogonal { dot: f64 },

    #[error("size guard: {what} requires N <= {max}, got {n}")]
    SizeGuard { what: &'static str, n: usize, max: usize },

    #[error("{what} requires exactly {expected} nodes, got {actual}")]
    NodeCount {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("graphs have different node counts ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
