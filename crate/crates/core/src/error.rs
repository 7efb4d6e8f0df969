use thiserror::Error;

use crate::rational::Q;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Wrong row count, mismatched scenarios, or a bad vector length.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("weights sum to {0}, expected 1")]
    Normalization(Q),

    #[error("n = {n} exceeds the enumeration limit of {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("operation requires the (2,2,2) scenario, got n = {0}")]
    UnsupportedScenario(usize),

    /// The input is outside the branch an operation handles, e.g. a local
    /// distribution handed to a nonlocal-only routine.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A structural fact that must hold for nonsignaling inputs failed.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The read-off decomposition does not reproduce the input.
    #[error("inconsistent input: reconstruction residual {residual}")]
    InconsistentInput { residual: Q },

    #[error("did not converge after {iterations} iterations (best objective {best_objective})")]
    NoConvergence {
        iterations: usize,
        best_objective: f64,
        best_weights: Vec<f64>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
