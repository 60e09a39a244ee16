//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum SfmgError {
    /// Matrix dimensions do not match what an operation requires.
    #[error("shape error: {0}")]
    Shape(String),

    /// An input violates a numerical precondition (asymmetry, rank
    /// deficiency, tangency violation, out-of-range argument).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The principal matrix logarithm is undefined (eigenvalue at -1).
    #[error("branch cut: {0}")]
    BranchCut(String),

    /// An iteration failed to reach its tolerance.
    #[error("no convergence after {iters} iterations (residual {residual:.3e}): {what}")]
    NonConvergence {
        what: String,
        iters: usize,
        residual: f64,
    },

    /// Malformed data file.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Invalid configuration or unknown name.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Rejection sampling exhausted its attempt budget.
    #[error("rejection sampling failed after {attempts} attempts for {family}")]
    RejectionExhausted { family: String, attempts: usize },

    #[error("missing dependency: {0}")]
    MissingDependency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SfmgError>;

impl SfmgError {
    /// Process exit code for the CLI: 2 usage, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            SfmgError::Invalid(_) | SfmgError::MissingDependency(_) => 2,
            SfmgError::Parse { .. } | SfmgError::Io(_) | SfmgError::Serde(_) => 3,
            SfmgError::Shape(_)
            | SfmgError::Degenerate(_)
            | SfmgError::BranchCut(_)
            | SfmgError::NonConvergence { .. }
            | SfmgError::RejectionExhausted { .. } => 4,
        }
    }
}
