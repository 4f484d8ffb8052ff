use thiserror::Error;

use crate::graph::VertexId;

/// Which of the two vertex degree sums vanished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Out => f.write_str("outgoing"),
            Direction::In => f.write_str("incoming"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge ({from},{to}) has non-positive weight {weight}")]
    NonPositiveWeight { from: VertexId, to: VertexId, weight: f64 },

    #[error("vertex {vertex} has non-positive measure {measure}")]
    NonPositiveMeasure { vertex: VertexId, measure: f64 },

    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),

    #[error("duplicate edge ({from},{to})")]
    DuplicateEdge { from: VertexId, to: VertexId },

    #[error("vertex {vertex} has zero total {direction} weight")]
    IsolatedDirection { vertex: VertexId, direction: Direction },

    #[error("vertex id {id} out of range for a graph with {n} vertices")]
    VertexOutOfRange { id: VertexId, n: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("subset is empty")]
    EmptySubset,

    #[error("Kirchhoff condition violated (max |beta+ - beta-| = {max_violation})")]
    KirchhoffViolated { max_violation: f64 },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("subset of size {size} exceeds the exact enumeration cap {cap}")]
    SubsetTooLarge { size: usize, cap: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("filtration has no level with a non-empty complement")]
    EmptyComplement,

    #[error("could not generate a non-degenerate instance after {attempts} attempts")]
    DegenerateInstance { attempts: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema violation: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
