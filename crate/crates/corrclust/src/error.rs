use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at {0}: pairs need two distinct endpoints")]
    SelfLoop(Vertex),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: Vertex, n: usize },
    #[error("neighbor index {index} out of bounds for vertex {vertex} of degree {degree}")]
    IndexOutOfBounds { vertex: Vertex, index: usize, degree: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("pair ({0}, {1}) appears twice in an insertion-only stream")]
    DuplicatePair(Vertex, Vertex),
    #[error("removal of ({0}, {1}) before it was inserted with that label")]
    RemovalBeforeInsertion(Vertex, Vertex),
    #[error("insertion onto already-labeled pair ({0}, {1})")]
    DoubleInsertion(Vertex, Vertex),
    #[error("pair ({0}, {1}) carries no label at stream end")]
    Unlabeled(Vertex, Vertex),
    #[error("negative record ({0}, {1}) in a positive-only stream")]
    NegativeInPlusOnly(Vertex, Vertex),
}

/// Calling an operation outside its precondition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractError {
    #[error("vertex {0} is not dense under the given parameters")]
    NotDense(Vertex),
    #[error("vertex {0} is not in the vertex sample")]
    NotSampled(Vertex),
    #[error("vertex {0} is not a dense candidate")]
    NotCandidate(Vertex),
    #[error("parameter out of range: {0}")]
    BadParams(String),
    #[error("brute force supports n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid instance: {0}")]
    BadInstance(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing or malformed header, expected `{0}`")]
    Header(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
