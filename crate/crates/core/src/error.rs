use thiserror::Error;

/// Failure modes of the geometry routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unbounded body: slab directions do not span R^{0}")]
    Unbounded(usize),

    #[error("singular matrix ({0})")]
    Singular(String),

    #[error("matrix is not symmetric positive semidefinite: {0}")]
    NotPsd(String),

    #[error("capacity exceeded: {what} (limit {limit}, got {got})")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        /// Best iterate reached before giving up, in f64.
        best: Vec<f64>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl GeomError {
    /// True for the guard/iteration-cap family, which the CLI maps to its own exit code.
    pub fn is_capacity(&self) -> bool {
        matches!(self, GeomError::Capacity { .. } | GeomError::NotConverged { .. })
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
