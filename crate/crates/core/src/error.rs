use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop ({0}, {0}) not allowed under the loopless policy")]
    LoopNotAllowed(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid weight {weight} on edge ({i}, {j}): weights must be positive and finite")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("graph declared undirected but entry ({0}, {1}) has no matching reverse entry")]
    Asymmetric(usize, usize),

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular or numerically singular system")]
    Singular,

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("t exceeds 1/rho(A): t = {t}, 1/rho(A) = {bound}")]
    ParameterOutOfRange { t: f64, bound: f64 },

    #[error("nonpositive denominator certificate {0:e}")]
    NonPositiveDenominator(f64),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("dense budget exceeded: n = {n} is larger than {budget}")]
    DenseBudget { n: usize, budget: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by bad input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::Io(_) | Error::Csv(_)
        )
    }
}
