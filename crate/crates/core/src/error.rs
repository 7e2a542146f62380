use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be nonzero")]
    ZeroInput,

    #[error("value has about {digits} decimal digits, over the bound of {bound}")]
    DigitBound { digits: usize, bound: usize },

    #[error("incomplete factorization: {0}")]
    IncompleteFactorization(String),

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("residue class {a} mod {b} contains at most one prime")]
    EmptyResidueClass { a: u64, b: u64 },

    #[error("{what} {value} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: u64,
        bound: u64,
    },

    #[error("prime {p} is excluded: {reason}")]
    BadPrime { p: u64, reason: String },

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}
