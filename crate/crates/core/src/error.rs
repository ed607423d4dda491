use thiserror::Error;

/// Errors raised anywhere in the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff {dim} too small: neglected tail population {tail:.3e} exceeds 1e-12")]
    CutoffTooSmall { dim: usize, tail: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation: population {population:.3e} in the top two Fock levels of a dim-{dim} space")]
    Truncation { dim: usize, population: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("decomposition does not reproduce the density matrix (max deviation {0:.3e})")]
    DecompositionMismatch(f64),

    #[error("assumption violated: {0}")]
    AssumptionViolation(String),

    #[error("decomposition recipe disagrees with the analytic branch: {0}")]
    BranchMismatch(String),

    #[error("convex-roof condition violated: {0}")]
    ConditionViolation(String),

    #[error("candidate grid of {size} states exceeds the cap of {cap}")]
    GridTooLarge { size: usize, cap: usize },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex stalled after {0} iterations")]
    NumericalStall(usize),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("invalid recipe parameter: {0}")]
    InvalidRecipeParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
