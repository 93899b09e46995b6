use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LgtError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource cap exceeded: dimension {dim} > cap {cap}")]
    Resource { dim: usize, cap: usize },
    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:e})")]
    Convergence { iterations: usize, best_residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LgtError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LgtError::Domain(msg.into()))
}
