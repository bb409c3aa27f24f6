use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A deformation parameter lies outside the range where the algebra is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-supplied argument violates an operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("eigensolver failed to converge after {iterations} iterations")]
    Convergence { iterations: usize },
}

impl Error {
    /// True for failures caused by the caller (bad parameters or arguments)
    /// rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::InvalidInput(_))
    }
}
