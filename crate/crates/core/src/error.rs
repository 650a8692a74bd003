use thiserror::Error;

/// Malformed textual input with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset} in `{input}`")]
pub struct ParseError {
    pub input: String,
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(input: &str, offset: usize, message: &str) -> Self {
        ParseError { input: input.to_string(), offset, message: message.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("no value assigned to variable '{0}'")]
    MissingAssignment(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("denominator is identically zero")]
    ZeroDenominator,
}

/// Error type shared by the graph, quadric, Landau, solver and renormalization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not one-particle irreducible with a loop")]
    NotOnePi,
    #[error("unknown edge '{0}'")]
    UnknownEdge(String),
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("matrix family is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("scheme undefined: {0}")]
    Scheme(String),
    #[error("physical limit does not exist at this truncation: {0}")]
    NoPhysicalLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
