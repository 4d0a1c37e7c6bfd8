use thiserror::Error;

/// Errors raised by state construction, transforms and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shapes that do not fit together (entries vs. dims, mismatched operands).
    #[error("structural error: {0}")]
    Structural(String),

    /// A loaded or constructed object violates a state invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// The operation is defined only for a subset of shapes (e.g. PI needs d_a = d_b).
    #[error("unsupported shape: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed external document (JSON schema mismatch).
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
