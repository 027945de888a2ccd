use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("singularity error: {0}")]
    Singularity(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    /// A theorem hypothesis does not hold for the requested input.
    #[error("{theorem} requires {condition}; got {got}")]
    Precondition {
        theorem: String,
        condition: String,
        got: String,
    },
    #[error("validity error: {0}")]
    Validity(String),
    #[error("undefined: {0}")]
    Undefined(String),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("stagnation after {iterations} iterations: {diagnostics}")]
    Stagnation { iterations: usize, diagnostics: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(theorem: &str, condition: &str, got: String) -> Error {
    Error::Precondition {
        theorem: theorem.to_string(),
        condition: condition.to_string(),
        got,
    }
}
