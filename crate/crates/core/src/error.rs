use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The inputs violate the hypothesis of the theorem the operation relies on.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("instance of order {n} exceeds the oracle limit {limit}")]
    OracleLimit { n: usize, limit: usize },

    #[error("t-neighbour refinement failed after {attempts} attempts: vertex {vertex} has {count} neighbours in class {class}")]
    Refinement {
        attempts: usize,
        vertex: u32,
        class: usize,
        count: usize,
    },

    #[error("equitable colouring did not converge: {0}")]
    Coloring(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
