use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("failed to parse graph JSON: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("edge {edge:?}: nonpositive length {length}")]
    NonPositiveLength { edge: String, length: f64 },
    #[error("edge {edge:?}: endpoint {vertex:?} is not a vertex")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("invalid graph point: {0}")]
    InvalidPoint(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopError {
    #[error("found only {found} independent cycles for genus {genus}")]
    Incomplete { found: usize, genus: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistenceError {
    #[error("simplex {coface:?} (value {coface_value}) enters before its face {face:?} (value {face_value})")]
    NonMonotone {
        face: Vec<usize>,
        face_value: f64,
        coface: Vec<usize>,
        coface_value: f64,
    },
    #[error("face {face:?} of simplex {coface:?} is missing from the complex")]
    MissingFace { face: Vec<usize>, coface: Vec<usize> },
    #[error("malformed simplex {0:?}: vertices must be strictly increasing, 1 to 3 of them")]
    MalformedSimplex(Vec<usize>),
    #[error("no diagram for dimension {0}; only 0 and 1 are available")]
    DimensionOutOfRange(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Loops(#[from] LoopError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
