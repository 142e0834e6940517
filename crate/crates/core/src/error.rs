use thiserror::Error;

/// Errors raised by the counting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("polynomial has zero discriminant")]
    ZeroDiscriminant,

    #[error("polynomial x^3 + {t}x^2 + {a}x + {b} is reducible")]
    Reducible { t: i64, a: i64, b: i64 },

    #[error("work budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("factorization gave up on cofactor {cofactor}")]
    Factorization { cofactor: u128 },

    #[error("numerical precision exhausted: {0}")]
    Precision(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("census cache: {0}")]
    Cache(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
