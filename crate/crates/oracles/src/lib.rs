//! Independent numerical oracles for `ris-core`.
//!
//! Nothing here shares code with the product numerics: Bessel values come from
//! adaptive quadrature of integral representations, the double-Rayleigh law from
//! its exponential-mixture form, and small-N outage probabilities from
//! deterministic tensor-grid integration. These are slow on purpose and are
//! meant to be called from tests only.

pub mod bessel;
pub mod mixture;
pub mod outage;
pub mod quadrature;
pub mod stats;

use std::fmt;

use thiserror::Error;

pub use bessel::{oracle_k0, oracle_k1};
pub use mixture::{gsq_cdf, gsq_pdf};
pub use outage::{oracle_outage_small_n, OracleGrid, OraclePhases};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("quadrature did not converge on [{lo}, {hi}] after {intervals} intervals (error estimate {error:e})")]
    NonConvergence {
        lo: f64,
        hi: f64,
        intervals: usize,
        error: f64,
    },
    #[error("oracle argument out of range: {0}")]
    Domain(String),
    #[error("unsupported oracle configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Quadrature,
    ArbitraryPrecisionSeries,
    ExhaustiveMc,
}

impl fmt::Display for OracleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OracleMethod::Quadrature => "quadrature",
            OracleMethod::ArbitraryPrecisionSeries => "arbitrary-precision-series",
            OracleMethod::ExhaustiveMc => "exhaustive-MC",
        };
        f.write_str(s)
    }
}

/// A value produced by an oracle together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub computed_value: f64,
    pub method: OracleMethod,
    /// Integrand evaluations, series terms or MC samples spent.
    pub samples_or_terms: u64,
}
