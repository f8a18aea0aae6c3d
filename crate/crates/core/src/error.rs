use thiserror::Error;

/// Errors raised by the entropy, Weyl and oracle routines.
///
/// Mode indices carried by variants are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} modes, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("a state needs at least one mode")]
    NoModes,

    #[error("inverse temperature must be positive, got {0}")]
    InvalidTemperature(f64),

    #[error("Renyi order must satisfy alpha > 0 and alpha != 1, got {0}")]
    InvalidOrder(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("support condition violated on modes {modes:?} (sigma is vacuum where rho is not)")]
    SupportViolation { modes: Vec<usize> },

    #[error("states must be faithful (all inverse temperatures finite); vacuum modes {modes:?}")]
    NotFaithful { modes: Vec<usize> },

    #[error("displacement must be nonzero")]
    ZeroDisplacement,

    #[error("truncated dimension {dim} exceeds the oracle limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
