//! Uniform phase codebooks and the phase errors they induce.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::channel::{
    cascade, CascadeTerm, CascadedCoefficient, ChannelRealization, PhaseLevels, SystemConfig,
};
use crate::error::{domain, Result};

/// Wraps an angle to (-π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The codebook `{2πl/L : l = 0..L-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCodebook {
    levels: u32,
    points: Vec<f64>,
}

/// Outcome of quantizing one optimal phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantized {
    pub index: u32,
    pub phase: f64,
    /// `wrap(phase - phi_star)`, within [-π/L, π/L].
    pub theta: f64,
}

impl PhaseCodebook {
    pub fn new(levels: u32) -> Result<Self> {
        if levels < 2 {
            return domain(format!("a codebook needs at least 2 levels, got {levels}"));
        }
        let points = (0..levels)
            .map(|l| TAU * l as f64 / levels as f64)
            .collect();
        Ok(Self { levels, points })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Nearest codebook point in circular distance. Exact midpoints go to the
    /// lower index.
    pub fn quantize(&self, phi_star: f64) -> Result<Quantized> {
        if !phi_star.is_finite() {
            return domain(format!("cannot quantize non-finite phase {phi_star}"));
        }
        let mut w = phi_star.rem_euclid(TAU);
        if w >= TAU {
            w = 0.0;
        }
        let l = self.levels as usize;
        let below = ((w * self.levels as f64 / TAU).floor() as usize).min(l - 1);
        let above = (below + 1) % l;
        let d_below = wrap_phase(w - self.points[below]).abs();
        let d_above = wrap_phase(w - self.points[above]).abs();
        let index = if d_below < d_above {
            below
        } else if d_above < d_below {
            above
        } else {
            below.min(above)
        };
        let phase = self.points[index];
        Ok(Quantized {
            index: index as u32,
            phase,
            theta: wrap_phase(phase - w),
        })
    }
}

/// Applies the configured quantizer to every element. With perfect phases the
/// residuals are zero.
pub fn quantize_terms(
    levels: PhaseLevels,
    terms: &[CascadeTerm],
) -> Result<Vec<CascadedCoefficient>> {
    match levels {
        PhaseLevels::Perfect => Ok(terms
            .iter()
            .map(|t| CascadedCoefficient::new(t.magnitude, 0.0))
            .collect()),
        PhaseLevels::Discrete(l) => {
            let book = PhaseCodebook::new(l)?;
            terms
                .iter()
                .map(|t| {
                    Ok(CascadedCoefficient::new(
                        t.magnitude,
                        book.quantize(t.optimal_phase)?.theta,
                    ))
                })
                .collect()
        }
    }
}

/// Cascades a realization and quantizes every optimal phase with the
/// configured codebook.
pub fn cascade_and_quantize(
    cfg: &SystemConfig,
    real: &ChannelRealization,
) -> Result<Vec<CascadedCoefficient>> {
    quantize_terms(cfg.levels, &cascade(cfg, real)?)
}

/// A phase error drawn uniformly from [-π/L, π/L]. Consumes one uniform.
pub fn sample_phase_error<R: Rng + ?Sized>(levels: u32, rng: &mut R) -> Result<f64> {
    if levels < 2 {
        return domain(format!("phase error law needs L >= 2, got {levels}"));
    }
    Ok(uniform_error(PI / levels as f64, rng))
}

#[inline]
pub(crate) fn uniform_error<R: Rng + ?Sized>(half_width: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (2.0 * u - 1.0) * half_width
}

/// Which boundary strip of the two-level error range a conditioned error lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripSide {
    /// [-π/2, -π/2 + θ]
    Low,
    /// [π/2 - θ, π/2]
    High,
}

pub(crate) fn check_strip_width(theta_width: f64) -> Result<()> {
    if !(theta_width > 0.0 && theta_width <= FRAC_PI_2) {
        return domain(format!(
            "strip width must lie in (0, π/2], got {theta_width}"
        ));
    }
    Ok(())
}

#[inline]
pub(crate) fn strip_error<R: Rng + ?Sized>(side: StripSide, theta_width: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    match side {
        StripSide::Low => -FRAC_PI_2 + u * theta_width,
        StripSide::High => FRAC_PI_2 - u * theta_width,
    }
}

/// A two-level phase error conditioned on lying in one boundary strip of width
/// `theta_width`. Consumes one uniform.
pub fn conditional_phase_error<R: Rng + ?Sized>(
    levels: u32,
    side: StripSide,
    theta_width: f64,
    rng: &mut R,
) -> Result<f64> {
    if levels != 2 {
        return domain(format!(
            "boundary strips are defined for L = 2 only, got {levels}"
        ));
    }
    check_strip_width(theta_width)?;
    Ok(strip_error(side, theta_width, rng))
}
