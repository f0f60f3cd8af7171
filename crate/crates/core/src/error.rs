//! Crate-wide error type.
//!
//! Errors are grouped by how a caller should react: data/validation problems
//! (bad dimensions, non-Hermitian input, out-of-domain parameters, parse
//! failures) are distinguished from numerical failures (singular transfer
//! matrices, solver breakdowns) and from failed cross-checks, so the CLI can
//! map them onto stable exit codes.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape or dimension mismatch between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An operator expected to be Hermitian was not, within tolerance.
    /// Inputs are rejected rather than symmetrized silently.
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    /// A parameter or input value is outside its documented domain.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A linear system or map inversion is singular / too ill-conditioned.
    #[error("singular or ill-conditioned: {0}")]
    Singular(String),

    /// The conic solver failed to produce a usable optimal solution.
    #[error("solver failure: {0}")]
    Solver(String),

    /// An independently computed cross-check (duality gap, witness
    /// feasibility, payoff identity, ...) did not hold.
    #[error("cross-check failure: {0}")]
    CrossCheck(String),

    /// Malformed channel files, builtin mini-specs, or JSON payloads.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse classification used by the CLI to choose process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Problems with the user-supplied input (exit code 2).
    Input,
    /// Numerical/solver failures (exit code 3).
    Solver,
    /// Failed mathematical cross-checks (exit code 1).
    Check,
}

impl Error {
    /// Classify this error for exit-code purposes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Dimension(_)
            | Error::NotHermitian { .. }
            | Error::Validation(_)
            | Error::Parse(_)
            | Error::Singular(_) => ErrorClass::Input,
            Error::Solver(_) => ErrorClass::Solver,
            Error::CrossCheck(_) => ErrorClass::Check,
        }
    }
}
