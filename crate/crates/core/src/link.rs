//! Received SNR, outage events and the per-sample geometric bounds.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{CascadedCoefficient, SystemConfig};
use crate::error::{domain, Result};

/// Slack allowed on residual-phase range checks.
const PHASE_SLACK: f64 = 1e-12;

/// `G_N = Σ g_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateG {
    pub value: Complex64,
    pub n_elements: usize,
}

impl AggregateG {
    pub fn norm_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// `ε0 = (2^R0 - 1) / (η² Ω_S Ω_I)`; outage is `|G_N|^2 < ε0 / ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageThreshold {
    pub epsilon0: f64,
}

impl OutageThreshold {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Self {
            // sequential division keeps the evaluation defaults exact (3.125, 9.375)
            epsilon0: rate_threshold(cfg) / cfg.eta / cfg.eta / cfg.omega_s / cfg.omega_i,
        }
    }

    /// `ε0 / ρ`.
    pub fn at(&self, rho: f64) -> f64 {
        self.epsilon0 / rho
    }
}

/// `2^R0 - 1`, the SNR below which the target rate is missed.
pub fn rate_threshold(cfg: &SystemConfig) -> f64 {
    cfg.rate_bpcu.exp2() - 1.0
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_nan() || rho <= 0.0 {
        return domain(format!("transmit SNR must be positive, got {rho}"));
    }
    Ok(())
}

pub fn aggregate(coeffs: &[CascadedCoefficient]) -> Result<AggregateG> {
    if coeffs.is_empty() {
        return domain("cannot aggregate an empty coefficient list");
    }
    Ok(AggregateG {
        value: coeffs.iter().map(CascadedCoefficient::value).sum(),
        n_elements: coeffs.len(),
    })
}

fn direct_gain(cfg: &SystemConfig, h_sd: Option<Complex64>) -> Result<Option<f64>> {
    match (cfg.direct_link, h_sd) {
        (true, Some(h)) => Ok(Some(h.norm())),
        (true, None) => domain("direct link enabled but no h_sd supplied"),
        (false, _) => Ok(None),
    }
}

/// Received SNR. Without a direct link `ρ η² Ω_S Ω_I |G|^2`; with one
/// `ρ | |h_SD| + η sqrt(Ω_S Ω_I) G |^2`, the residual phases in `G` being
/// measured relative to `arg(h_SD)`.
pub fn received_snr(
    cfg: &SystemConfig,
    g: &AggregateG,
    rho: f64,
    h_sd: Option<Complex64>,
) -> Result<f64> {
    check_rho(rho)?;
    let scale = cfg.eta * (cfg.omega_s * cfg.omega_i).sqrt();
    Ok(match direct_gain(cfg, h_sd)? {
        None => rho * scale * scale * g.norm_sqr(),
        Some(d) => rho * (d + scale * g.value).norm_sqr(),
    })
}

/// True when the achievable rate falls short of the target. Boundary values
/// (equality) are not outages.
pub fn outage_indicator(
    cfg: &SystemConfig,
    g: &AggregateG,
    rho: f64,
    h_sd: Option<Complex64>,
) -> Result<bool> {
    check_rho(rho)?;
    if cfg.direct_link {
        Ok(received_snr(cfg, g, rho, h_sd)? < rate_threshold(cfg))
    } else {
        Ok(g.norm_sqr() < OutageThreshold::from_config(cfg).at(rho))
    }
}

/// Lower bound `(|g2| - |g1|/2)^2 + 3|g1|^2/4` on `|g1 + g2|^2`, valid when both
/// residual phases lie in [-π/3, π/3].
pub fn bound_l3_lower(g1: &CascadedCoefficient, g2: &CascadedCoefficient) -> Result<f64> {
    let limit = PI / 3.0 + PHASE_SLACK;
    if g1.residual_phase.abs() > limit || g2.residual_phase.abs() > limit {
        return domain(format!(
            "three-level bound needs |Θ| <= π/3, got {} and {}",
            g1.residual_phase, g2.residual_phase
        ));
    }
    let (a, b) = (g1.magnitude, g2.magnitude);
    Ok((b - 0.5 * a).powi(2) + 0.75 * a * a)
}

/// `Λ = (|g1| - cos(2θ)|g2|)^2 + 4|g2|^2/ρ` with `θ = ρ^{-1/2}`; exceeds
/// `|g1 + g2|^2` whenever `Θ2 - Θ1 ∈ [π - 2θ, π]`.
pub fn bound_l2_lambda(g1_mag: f64, g2_mag: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if g1_mag < 0.0 || g2_mag < 0.0 {
        return domain("magnitudes must be nonnegative");
    }
    let theta = rho.sqrt().recip();
    Ok((g1_mag - (2.0 * theta).cos() * g2_mag).powi(2) + 4.0 * g2_mag * g2_mag / rho)
}

/// Direct-link SNR sandwich `ρ(|h_SD|^2 + η²Ω_SΩ_I|G|^2) <= γ <= ρ(|h_SD| + η sqrt(Ω_SΩ_I)|G|)^2`.
/// The lower side relies on `|arg G| <= π/2`.
pub fn direct_link_snr_bounds(
    cfg: &SystemConfig,
    g: &AggregateG,
    rho: f64,
    h_sd: Complex64,
) -> Result<(f64, f64)> {
    check_rho(rho)?;
    let d = h_sd.norm();
    let scale = cfg.eta * (cfg.omega_s * cfg.omega_i).sqrt();
    let gm = g.value.norm();
    Ok((
        rho * (d * d + scale * scale * gm * gm),
        rho * (d + scale * gm).powi(2),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PhaseLevels;
    use std::f64::consts::FRAC_PI_2;

    fn c(m: f64, t: f64) -> CascadedCoefficient {
        CascadedCoefficient::new(m, t)
    }

    fn g(v: Complex64) -> AggregateG {
        AggregateG {
            value: v,
            n_elements: 1,
        }
    }

    #[test]
    fn aggregate_examples() {
        let a = aggregate(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(a.value, Complex64::new(2.0, 0.0));
        let a = aggregate(&[c(1.0, FRAC_PI_2), c(1.0, -FRAC_PI_2)]).unwrap();
        assert!(a.norm_sqr() < 1e-30);
        let a = aggregate(&[c(1.0, PI / 3.0), c(2.0, -PI / 3.0)]).unwrap();
        assert!((a.norm_sqr() - 3.0).abs() < 1e-14);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn snr_examples() {
        let cfg = SystemConfig::new(2, PhaseLevels::Discrete(3));
        let two = g(Complex64::new(2.0, 0.0));
        assert!((received_snr(&cfg, &two, 10.0, None).unwrap() - 12.8).abs() < 1e-12);
        assert_eq!(
            received_snr(&cfg, &g(Complex64::new(0.0, 0.0)), 10.0, None).unwrap(),
            0.0
        );
        let d = cfg.with_direct_link(1.0);
        let v = received_snr(
            &d,
            &g(Complex64::new(0.0, 0.0)),
            7.0,
            Some(Complex64::from_polar(1.0, 0.4)),
        )
        .unwrap();
        assert!((v - 7.0).abs() < 1e-12);
        assert!(received_snr(&cfg, &two, 0.0, None).is_err());
        assert!(received_snr(&d, &two, 1.0, None).is_err());
    }

    #[test]
    fn outage_examples() {
        let cfg = SystemConfig::new(2, PhaseLevels::Discrete(3));
        let eps = OutageThreshold::from_config(&cfg).epsilon0;
        assert!((eps - 3.125).abs() < 1e-12);
        assert!(
            !outage_indicator(&cfg, &g(Complex64::new(3.2f64.sqrt(), 0.0)), 1.0, None).unwrap()
        );
        let zero = g(Complex64::new(0.0, 0.0));
        for rho in [1e-3, 1.0, 1e12] {
            assert!(outage_indicator(&cfg, &zero, rho, None).unwrap());
        }
        // |G|^2 == ε0/ρ exactly
        assert!(!outage_indicator(&cfg, &g(Complex64::new(1.0, 0.0)), eps, None).unwrap());
    }

    #[test]
    fn exact_cancellation_is_outage_at_any_snr() {
        let cfg = SystemConfig::new(2, PhaseLevels::Discrete(2));
        let a = aggregate(&[c(0.8, -FRAC_PI_2), c(0.8, FRAC_PI_2)]).unwrap();
        for rho in [1.0, 1e6, 1e12] {
            assert!(outage_indicator(&cfg, &a, rho, None).unwrap());
        }
    }

    #[test]
    fn rate_two_threshold() {
        let cfg = SystemConfig::new(2, PhaseLevels::Discrete(2)).with_rate(2.0);
        assert!((OutageThreshold::from_config(&cfg).epsilon0 - 9.375).abs() < 1e-12);
    }

    #[test]
    fn l3_bound_examples() {
        let b = bound_l3_lower(&c(1.0, PI / 3.0), &c(1.0, -PI / 3.0)).unwrap();
        assert!((b - 1.0).abs() < 1e-15);
        let actual = aggregate(&[c(1.0, PI / 3.0), c(1.0, -PI / 3.0)])
            .unwrap()
            .norm_sqr();
        assert!((actual - 1.0).abs() < 1e-14);
        assert_eq!(bound_l3_lower(&c(1.0, 0.0), &c(1.0, 0.0)).unwrap(), 1.0);
        let b = bound_l3_lower(&c(2.0, 0.1), &c(1.0, -0.2)).unwrap();
        assert!((b - 3.0).abs() < 1e-15);
        let actual = aggregate(&[c(2.0, 0.1), c(1.0, -0.2)]).unwrap().norm_sqr();
        assert!((actual - (5.0 + 4.0 * 0.3f64.cos())).abs() < 1e-12 && b <= actual);
        assert!(bound_l3_lower(&c(1.0, 1.1), &c(1.0, 0.0)).is_err());
    }

    #[test]
    fn lambda_examples() {
        let l = bound_l2_lambda(1.0, 1.0, 1e16).unwrap();
        assert!(l < 1e-14);
        let l = bound_l2_lambda(1.0, 1.0, 100.0).unwrap();
        assert!((l - ((1.0 - 0.2f64.cos()).powi(2) + 0.04)).abs() < 1e-15);
        let actual = 2.0 + 2.0 * (PI - 0.2).cos();
        assert!(actual < l && (actual - 0.0399).abs() < 1e-4);
        assert_eq!(bound_l2_lambda(1.0, 0.0, 5.0).unwrap(), 1.0);
        assert!(bound_l2_lambda(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn outage_monotone_in_rho() {
        let cfg = SystemConfig::new(2, PhaseLevels::Discrete(3));
        let a = g(Complex64::new(0.1, 0.05));
        let flips: Vec<bool> = (0..40)
            .map(|i| outage_indicator(&cfg, &a, 10f64.powf(i as f64 / 4.0), None).unwrap())
            .collect();
        assert!(flips.windows(2).all(|w| w[0] || !w[1]));
        assert!(flips[0] && !flips[39]);
    }
}
