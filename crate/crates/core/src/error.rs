use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("word {0:?} is not admissible (must be empty or start with 'y' and end with 'x')")]
    NonAdmissibleWord(String),

    #[error("invalid word {0:?}: only the letters 'x' and 'y' are allowed")]
    InvalidWord(String),

    #[error("composition {0} is non-admissible: the last part must be at least 2")]
    Divergent(String),

    #[error("outside the convergence domain: {0}")]
    Domain(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("rewrite error: {0}")]
    Rewrite(String),

    #[error("parse error: {0}")]
    Parse(String),
}
