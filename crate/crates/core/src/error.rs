//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the linear algebra, state model,
/// semigroup and scenario layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix required to be positive semidefinite is not; carries the
    /// offending minimum eigenvalue.
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    /// A matrix inversion was requested on a (numerically) singular matrix.
    #[error("matrix is singular or too ill-conditioned to invert")]
    Singular,

    /// A correlation matrix violates the required structure (Hermiticity or
    /// the canonical-commutator diagonal constraint).
    #[error("state structure violation: {0}")]
    Structure(String),

    /// The squeezing-noise rate vanishes, so the worst-case boundary phase
    /// is undefined.
    #[error("lambda is zero: boundary phase undefined")]
    ZeroLambda,

    /// The dissipation matrix B is positive semidefinite, so no immediate
    /// violation direction exists (the generator is CP-compatible).
    #[error("dissipation matrix has no negative direction")]
    NoNegativeDirection,

    /// Non-positive integrator step.
    #[error("invalid integrator step dt = {0}")]
    InvalidStep(f64),

    /// A scenario was requested for parameters it does not apply to.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Parameter validation failure (negative rates, non-finite inputs, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
