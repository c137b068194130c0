//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("geometry violation: {0}")]
    Geometry(String),
    #[error("certification failure: {0}")]
    Certification(String),
    #[error("sampling resolution too coarse: {0}")]
    Sampling(String),
    #[error("no convergence after {evaluations} evaluations (partial value {partial:e}, error {error:e})")]
    Convergence {
        partial: f64,
        error: f64,
        evaluations: usize,
    },
    #[error("search failed: {0}")]
    Search(String),
    #[error("malformed input: {0}")]
    Input(String),
}

impl FracError {
    pub fn domain(msg: impl Into<String>) -> Self {
        FracError::Domain(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        FracError::Geometry(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            FracError::Input(_) => 1,
            FracError::Convergence { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, FracError>;
