use alloc::string::String;

/// Errors raised by precondition checks across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("limit {limit} out of range: must satisfy 2 <= limit <= {ceiling}")]
    LimitOutOfRange { limit: u64, ceiling: u64 },

    #[error("modulus {q} out of range: must satisfy 1 <= q <= {ceiling}")]
    ModulusOutOfRange { q: u64, ceiling: u64 },

    #[error("argument {value} exceeds the table limit {limit}")]
    BeyondTable { value: f64, limit: u64 },

    #[error("moduli {a} and {b} share the factor {gcd}")]
    NotCoprime { a: u64, b: u64, gcd: u64 },

    #[error("residue {a} is not coprime to modulus {q}")]
    ResidueNotCoprime { a: u64, q: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent tuple rejected: {0}")]
    InvalidTuple(String),

    #[error("partition outcome is inconsistent with the tuple: {0}")]
    InconsistentOutcome(String),

    #[error("length {n_j} lies in the difficult interval (x^(9/40), x^(1/4)] for x = {x_scale}")]
    DifficultInterval { n_j: u64, x_scale: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailed { tolerance: f64, estimate: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
