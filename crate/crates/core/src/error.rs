use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("singular or ill-conditioned: {0}")]
    Singular(String),
    #[error("state violates the uncertainty relation: {0}")]
    Unphysical(String),
    #[error("state is not pure: {0}")]
    Impure(String),
    #[error("degenerate symplectic eigenvalue {0} could not be resolved")]
    Degenerate(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("control parameters undefined (cd = 1)")]
    Undefined,
    #[error("computation too large: {0}")]
    TooLarge(String),
    #[error("no feasible point: {0}")]
    Infeasible(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, NgError>;
