use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    Hermiticity { deviation: f64 },

    #[error("probe grid does not resolve the wave function: {0}")]
    Resolution(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("pre- and post-selected states are orthogonal (|<f|i>| = {overlap:e})")]
    OrthogonalSelection { overlap: f64 },

    #[error("postselection success probability {pr_f:e} is below {threshold:e}")]
    PostselectionImpossible { pr_f: f64, threshold: f64 },

    #[error("log-likelihood is -inf everywhere on the search interval")]
    DegenerateModel,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
