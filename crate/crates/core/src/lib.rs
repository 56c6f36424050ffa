//! Monte-Carlo simulation and supporting numerics for links assisted by a
//! reconfigurable intelligent surface (RIS) whose phase shifts are restricted to
//! an `L`-level uniform codebook.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: `K1`, `x K1(x)` and its derivative, the double-Rayleigh CDF.
//! - [`channel`]: scenario configuration, seedable channel draws, cascaded gains.
//! - [`quantizer`]: the phase codebook, nearest-point quantization, phase-error laws.
//! - [`link`]: aggregation, received SNR, outage test and per-sample bounds.
//! - [`montecarlo`]: outage estimators with Wilson intervals and the boundary-strip
//!   conditional estimators used for the two-level converse.
//! - [`analysis`]: SNR sweeps, diversity-order fits and reference slope lines.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod link;
pub mod montecarlo;
pub mod quantizer;
pub mod specfun;

pub use error::{Error, Result};
