use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A rate vector does not form a probability distribution.
    #[error("invalid rate: {0}")]
    InvalidRate(String),
    /// A structurally impossible (scenario, category) cell is nonzero.
    #[error("structural zero violated: {0}")]
    Structural(String),
    /// A named preset does not exist.
    #[error("unknown preset `{0}`")]
    Lookup(String),
    /// Division by zero or a similar degenerate ratio.
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    /// An iterative numerical routine failed to converge or left its domain.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
