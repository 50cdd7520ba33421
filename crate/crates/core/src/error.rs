use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix (det = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("non-positive Jacobian J = {jacobian:e}{}", element.map(|e| format!(" in element {e}")).unwrap_or_default())]
    NonPositiveJacobian { jacobian: f64, element: Option<usize> },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular tangent matrix")]
    SingularTangent,

    #[error("algebraic constraint violated: |p| = {magnitude:e} at dof {dof}")]
    ConstraintViolation { dof: usize, magnitude: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
