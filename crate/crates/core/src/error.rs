use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field of order {characteristic}^{ext_degree} is too large")]
    FieldTooLarge { characteristic: u32, ext_degree: u32 },
    #[error("no character of order {order} on F_{q}: {order} does not divide {q} - 1")]
    CharacterOrder { q: u32, order: u32 },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("zeta_q(s) has a pole at s = 1")]
    Pole,
    #[error("polynomial does not belong to the requested family: {0}")]
    NotInFamily(String),
    #[error("work estimate {needed} exceeds budget {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("integrity check failed: {0}")]
    Integrity(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}
