use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The scaled recursion produced a numerator not divisible by 3.
    #[error("recursion numerator for a[{i},{j}] is not divisible by 3")]
    DivisibilityViolation { i: u32, j: u32 },

    #[error("checkpoint entry a[{i},{j}] disagrees with the recursion")]
    CheckpointMismatch { i: u32, j: u32 },

    #[error("coefficient a[{i},{j}] has not been computed")]
    NotComputed { i: i64, j: i64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported checkpoint format version {0:?}")]
    Version(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("b[{i},{j}] is not an integer")]
    IntegralityViolation { i: u32, j: u32 },

    #[error("series precision too low: {0}")]
    InsufficientPrecision(String),

    #[error("invalid series operation: {0}")]
    Series(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
