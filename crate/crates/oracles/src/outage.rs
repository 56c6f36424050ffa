//! Deterministic integration of `P(|g_1 e^{iΘ_1} + g_2 e^{iΘ_2}|^2 < t)`.
//!
//! Only the phase difference `Δ = Θ_2 - Θ_1` matters. For quantized phases the
//! errors are i.i.d. uniform on [-π/L, π/L], so |Δ| has the triangular density
//! `(2a - Δ) / (2a^2)` on [0, 2a] with `a = π/L`. Given `y_1 = |g_1|^2` and Δ the
//! admissible `|g_2|` form the interval between the roots of
//! `r^2 + 2 r_1 cos(Δ) r + r_1^2 - t = 0`, whose probability follows from the
//! mixture CDF. The remaining (y_1, Δ) integral runs on a fixed tensor grid.

use std::f64::consts::PI;

use crate::mixture::{gsq_cdf, gsq_pdf};
use crate::quadrature::{composite, gauss_legendre};
use crate::{OracleError, OracleMethod, OracleReport, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OraclePhases {
    Perfect,
    Quantized(u32),
}

/// Tensor grid used by [`oracle_outage_small_n`]; recorded so that oracle
/// values are reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGrid {
    /// Panels per magnitude segment (each panel is a 10-point rule).
    pub magnitude_panels: usize,
    /// Panels over the phase difference (each panel is a 10-point rule).
    pub phase_panels: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            magnitude_panels: 24,
            phase_panels: 12,
        }
    }
}

const RULE_POINTS: usize = 10;
// log-range of y_1 below the threshold that is integrated
const LOG_DEPTH: f64 = 40.0;
// P(|g|^2 > 400) < 1e-16
const Y_CAP: f64 = 400.0;

/// Outage probability `P(|G_N|^2 < threshold)` for `N ∈ {1, 2}`, where
/// `threshold = ε0 / ρ`.
pub fn oracle_outage_small_n(
    n: usize,
    phases: OraclePhases,
    threshold: f64,
    grid: OracleGrid,
) -> Result<OracleReport> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(OracleError::Domain(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    if let OraclePhases::Quantized(l) = phases {
        if l < 2 {
            return Err(OracleError::Domain(format!(
                "need at least 2 levels, got {l}"
            )));
        }
    }
    let name = format!("outage(N={n}, {phases:?}, t={threshold:e})");
    match n {
        1 => Ok(OracleReport {
            name,
            computed_value: gsq_cdf(threshold)?,
            method: OracleMethod::Quadrature,
            samples_or_terms: 1,
        }),
        2 => {
            let mut evals = 0u64;
            let value = two_element(phases, threshold, grid, &mut evals)?;
            Ok(OracleReport {
                name,
                computed_value: value,
                method: OracleMethod::Quadrature,
                samples_or_terms: evals,
            })
        }
        _ => Err(OracleError::Unsupported(format!(
            "outage quadrature supports N <= 2, got N = {n}"
        ))),
    }
}

fn two_element(phases: OraclePhases, t: f64, grid: OracleGrid, evals: &mut u64) -> Result<f64> {
    let rule = gauss_legendre(RULE_POINTS);
    match phases {
        OraclePhases::Perfect => given_phase_difference(0.0, t, grid, &rule, evals),
        OraclePhases::Quantized(l) => {
            let a = PI / l as f64;
            let mut err = None;
            let v = composite(&rule, 0.0, 2.0 * a, grid.phase_panels, |d| {
                let density = (2.0 * a - d) / (2.0 * a * a);
                match given_phase_difference(d, t, grid, &rule, evals) {
                    Ok(p) => density * p,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
    }
}

fn given_phase_difference(
    delta: f64,
    t: f64,
    grid: OracleGrid,
    rule: &[(f64, f64)],
    evals: &mut u64,
) -> Result<f64> {
    let (sin_d, cos_d) = delta.sin_cos();
    let y_max = if cos_d < 0.0 && sin_d.abs() > 0.0 {
        (t / (sin_d * sin_d)).min(Y_CAP)
    } else {
        t
    };
    let mut err = None;
    let mut integrand = |s: f64| -> f64 {
        let y1 = s.exp();
        let r1 = y1.sqrt();
        let disc = t - y1 * sin_d * sin_d;
        if disc <= 0.0 {
            return 0.0;
        }
        let root = disc.sqrt();
        let hi = -r1 * cos_d + root;
        if hi <= 0.0 {
            return 0.0;
        }
        let lo = (-r1 * cos_d - root).max(0.0);
        *evals += 3;
        let p = gsq_cdf(hi * hi).and_then(|a| Ok(a - gsq_cdf(lo * lo)?));
        match (p, gsq_pdf(y1)) {
            (Ok(p), Ok(f)) => f * y1 * p,
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let ln_t = t.ln();
    let mut v = composite(
        rule,
        ln_t - LOG_DEPTH,
        ln_t,
        grid.magnitude_panels,
        &mut integrand,
    );
    if y_max > t {
        v += composite(
            rule,
            ln_t,
            y_max.ln(),
            grid.magnitude_panels,
            &mut integrand,
        );
    }
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}
