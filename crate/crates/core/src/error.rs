use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate SQUID: S(phi_b) = {0:e}")]
    DegenerateSquid(f64),

    #[error("{what}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },

    #[error("null state: {0}")]
    NullState(&'static str),

    #[error("measurement outcome {outcome} has negligible probability {probability:e}")]
    NullBranch { outcome: usize, probability: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time step too large: dt * max|H| = {product:.4} exceeds {limit}")]
    StepTooLarge { product: f64, limit: f64 },

    #[error("invariant violated at t = {t_us} us: {what}")]
    InvariantViolation { t_us: f64, what: String },

    #[error("Hermitian eigensolver failed to converge")]
    Eigensolver,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
