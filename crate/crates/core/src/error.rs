use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} has no incident edge (vertex ids must be dense 0..{count})")]
    DanglingVertex { vertex: usize, count: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),
    #[error("amplitudes violate unitarity: {0}")]
    NotUnitary(String),
    #[error("missing local unitary for vertex {0}")]
    MissingUnitary(usize),
    #[error("vertex {vertex} has degree {degree} but its unitary is {dim}x{dim}")]
    DimensionMismatch {
        vertex: usize,
        degree: usize,
        dim: usize,
    },
    #[error("state has length {got}, expected {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("port {port} out of range at vertex {vertex} (degree {degree})")]
    PortOutOfRange {
        vertex: usize,
        port: usize,
        degree: usize,
    },
    #[error("{0} is not an edge of the graph")]
    NotAnEdge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph is not a standard ring: {0}")]
    NotARing(String),
    #[error("vertex {vertex} has degree {degree}, expected 2")]
    NotDegreeTwo { vertex: usize, degree: usize },
}

pub type Result<T> = std::result::Result<T, WalkError>;
