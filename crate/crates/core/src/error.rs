use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "series did not reach relative tolerance {tolerance:e} within {terms} terms at x = {x}"
    )]
    Accuracy {
        x: f64,
        tolerance: f64,
        terms: usize,
    },

    /// Fewer failures than the rare-event guard requires.
    #[error(
        "only {failures} failures in {trials} trials (need at least {required}); point censored"
    )]
    Censored {
        trials: u64,
        failures: u64,
        required: u64,
    },

    #[error("every sweep point was censored")]
    AllCensored,

    #[error("diversity fit needs at least {needed} qualifying points, found {found}")]
    InsufficientPoints { found: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
