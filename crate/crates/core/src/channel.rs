//! Scenario configuration and channel generation.
//!
//! All coefficients are circularly-symmetric complex Gaussian: a coefficient with
//! variance `Ω` has independent real and imaginary parts, each `N(0, Ω/2)`.
//! Random numbers come from counter-based ChaCha8 substreams keyed by
//! `(seed, stream_id)`, so a given stream always yields the same draws no matter
//! which worker consumes it or in what order streams are visited.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::quantizer::wrap_phase;

/// Number of quantization levels of each element's phase shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLevels {
    /// Uniform codebook with `L >= 2` points.
    Discrete(u32),
    /// Continuous phases; residual phase errors are zero.
    Perfect,
}

impl PhaseLevels {
    /// Half-width `π/L` of the residual phase error interval (0 when perfect).
    pub fn max_phase_error(&self) -> f64 {
        match *self {
            PhaseLevels::Discrete(l) => std::f64::consts::PI / l as f64,
            PhaseLevels::Perfect => 0.0,
        }
    }
}

impl fmt::Display for PhaseLevels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseLevels::Discrete(l) => write!(f, "{l}"),
            PhaseLevels::Perfect => f.write_str("perfect"),
        }
    }
}

impl FromStr for PhaseLevels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("perfect") {
            return Ok(PhaseLevels::Perfect);
        }
        match s.parse::<u32>() {
            Ok(l) if l >= 2 => Ok(PhaseLevels::Discrete(l)),
            _ => Err(Error::InvalidConfig(format!(
                "levels must be an integer >= 2 or \"perfect\", got {s:?}"
            ))),
        }
    }
}

/// Every parameter of one simulated scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_elements: usize,
    pub levels: PhaseLevels,
    /// Common amplitude reflection coefficient, in (0, 1].
    pub eta: f64,
    /// Variance of each source-to-surface coefficient.
    pub omega_s: f64,
    /// Variance of each surface-to-destination coefficient.
    pub omega_i: f64,
    /// Target rate in bits per channel use.
    pub rate_bpcu: f64,
    pub direct_link: bool,
    /// Variance of the direct source-to-destination coefficient.
    pub omega_d: f64,
}

impl SystemConfig {
    /// A scenario with the evaluation defaults `η = 0.8`, `Ω_S = 1`, `Ω_I = 0.5`,
    /// `R0 = 1` bpcu and no direct link.
    pub fn new(n_elements: usize, levels: PhaseLevels) -> Self {
        Self {
            n_elements,
            levels,
            eta: 0.8,
            omega_s: 1.0,
            omega_i: 0.5,
            rate_bpcu: 1.0,
            direct_link: false,
            omega_d: 1.0,
        }
    }

    pub fn with_rate(mut self, rate_bpcu: f64) -> Self {
        self.rate_bpcu = rate_bpcu;
        self
    }

    pub fn with_direct_link(mut self, omega_d: f64) -> Self {
        self.direct_link = true;
        self.omega_d = omega_d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_elements == 0 {
            return bad("n_elements must be at least 1".into());
        }
        if let PhaseLevels::Discrete(l) = self.levels {
            if l < 2 {
                return bad(format!("levels must be >= 2, got {l}"));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        for (name, v) in [
            ("omega_s", self.omega_s),
            ("omega_i", self.omega_i),
            ("omega_d", self.omega_d),
            ("rate_bpcu", self.rate_bpcu),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }
}

/// Key of one counter-based random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this substream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One draw of every channel coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_si: Vec<Complex64>,
    pub h_id: Vec<Complex64>,
    pub h_sd: Option<Complex64>,
}

/// Magnitude and the optimal (continuous) phase shift of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeTerm {
    /// `|h_SI,n h_ID,n| / sqrt(Ω_S Ω_I)`.
    pub magnitude: f64,
    /// Optimal phase shift in (-π, π].
    pub optimal_phase: f64,
}

/// Normalized cascaded gain of one element after quantization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadedCoefficient {
    pub magnitude: f64,
    /// Quantized minus optimal phase, in radians.
    pub residual_phase: f64,
}

impl CascadedCoefficient {
    pub fn new(magnitude: f64, residual_phase: f64) -> Self {
        Self {
            magnitude,
            residual_phase,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.residual_phase)
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Draws a realization from the start of `stream`.
pub fn draw_realization(cfg: &SystemConfig, stream: &RngStream) -> Result<ChannelRealization> {
    cfg.validate()?;
    Ok(draw_realization_with(cfg, &mut stream.rng()))
}

/// Draws a realization from an already positioned generator. Consumes, in
/// order, `h_SI` (N coefficients), `h_ID` (N) and `h_SD` when enabled; each
/// coefficient takes two normals (real, then imaginary part). `cfg` must be
/// valid.
pub fn draw_realization_with<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    rng: &mut R,
) -> ChannelRealization {
    let n = cfg.n_elements;
    let h_si = (0..n).map(|_| complex_gaussian(rng, cfg.omega_s)).collect();
    let h_id = (0..n).map(|_| complex_gaussian(rng, cfg.omega_i)).collect();
    let h_sd = cfg.direct_link.then(|| complex_gaussian(rng, cfg.omega_d));
    ChannelRealization { h_si, h_id, h_sd }
}

fn arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// Normalized cascaded magnitudes and optimal phases. With a direct link the
/// optimal phase aligns each reflected path with `h_SD`.
pub fn cascade(cfg: &SystemConfig, real: &ChannelRealization) -> Result<Vec<CascadeTerm>> {
    let n = cfg.n_elements;
    if real.h_si.len() != n || real.h_id.len() != n {
        return Err(Error::Domain(format!(
            "realization has {}/{} coefficients, config expects {n}",
            real.h_si.len(),
            real.h_id.len()
        )));
    }
    let reference = match (cfg.direct_link, real.h_sd) {
        (true, Some(h)) => arg(h),
        (true, None) => {
            return Err(Error::Domain(
                "direct link enabled but realization has no h_sd".into(),
            ))
        }
        (false, _) => 0.0,
    };
    let norm = (cfg.omega_s * cfg.omega_i).sqrt();
    Ok(real
        .h_si
        .iter()
        .zip(&real.h_id)
        .map(|(a, b)| {
            let p = a * b;
            CascadeTerm {
                magnitude: p.norm() / norm,
                optimal_phase: wrap_phase(reference - arg(p)),
            }
        })
        .collect())
}

/// A normalized cascaded magnitude `|g|` drawn directly from its law:
/// `|g|^2 = X Y` with `X, Y ~ Exp(1)` independent. Consumes two exponentials.
pub fn sample_cascaded_magnitude<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let x: f64 = rng.sample(Exp1);
    let y: f64 = rng.sample(Exp1);
    (x * y).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn cfg1() -> SystemConfig {
        let mut c = SystemConfig::new(1, PhaseLevels::Perfect);
        c.omega_s = 1.0;
        c.omega_i = 1.0;
        c
    }

    #[test]
    fn cascade_phase_arithmetic() {
        let real = ChannelRealization {
            h_si: vec![Complex64::new(1.0, 0.0)],
            h_id: vec![Complex64::new(0.0, 1.0)],
            h_sd: None,
        };
        let t = cascade(&cfg1(), &real).unwrap();
        assert!((t[0].magnitude - 1.0).abs() < 1e-15);
        assert!((t[0].optimal_phase + FRAC_PI_2).abs() < 1e-15);

        let direct = cfg1().with_direct_link(1.0);
        let real = ChannelRealization {
            h_sd: Some(Complex64::from_polar(1.0, FRAC_PI_4)),
            ..real
        };
        let t = cascade(&direct, &real).unwrap();
        assert!((t[0].optimal_phase + FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn zero_product_has_zero_phase() {
        let real = ChannelRealization {
            h_si: vec![Complex64::new(0.0, 0.0)],
            h_id: vec![Complex64::new(0.3, -2.0)],
            h_sd: None,
        };
        let t = cascade(&cfg1(), &real).unwrap();
        assert_eq!(t[0].magnitude, 0.0);
        assert_eq!(t[0].optimal_phase, 0.0);
    }

    #[test]
    fn same_stream_is_bit_identical() {
        let cfg = SystemConfig::new(4, PhaseLevels::Discrete(3)).with_direct_link(2.0);
        let s = RngStream::new(17, 5);
        assert_eq!(
            draw_realization(&cfg, &s).unwrap(),
            draw_realization(&cfg, &s).unwrap()
        );
        let other = draw_realization(&cfg, &RngStream::new(17, 6)).unwrap();
        assert_ne!(draw_realization(&cfg, &s).unwrap(), other);
    }

    #[test]
    fn realization_shape() {
        let cfg = SystemConfig::new(3, PhaseLevels::Perfect);
        let r = draw_realization(&cfg, &RngStream::new(1, 0)).unwrap();
        assert_eq!((r.h_si.len(), r.h_id.len(), r.h_sd), (3, 3, None));
        let mut bad = cfg;
        bad.n_elements = 2;
        assert!(cascade(&bad, &r).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = SystemConfig::new(2, PhaseLevels::Discrete(2));
        assert!(ok.validate().is_ok());
        for broken in [
            SystemConfig {
                n_elements: 0,
                ..ok
            },
            SystemConfig { eta: 0.0, ..ok },
            SystemConfig { eta: 1.5, ..ok },
            SystemConfig {
                omega_s: -1.0,
                ..ok
            },
            SystemConfig {
                rate_bpcu: 0.0,
                ..ok
            },
            SystemConfig {
                levels: PhaseLevels::Discrete(1),
                ..ok
            },
        ] {
            assert!(
                matches!(broken.validate(), Err(Error::InvalidConfig(_))),
                "{broken:?}"
            );
        }
    }

    #[test]
    fn levels_parse_and_print() {
        assert_eq!(
            "perfect".parse::<PhaseLevels>().unwrap(),
            PhaseLevels::Perfect
        );
        assert_eq!(
            " 3 ".parse::<PhaseLevels>().unwrap(),
            PhaseLevels::Discrete(3)
        );
        assert!("1".parse::<PhaseLevels>().is_err());
        assert!("x".parse::<PhaseLevels>().is_err());
        assert_eq!(PhaseLevels::Discrete(8).to_string(), "8");
        assert_eq!(PhaseLevels::Perfect.to_string(), "perfect");
    }
}
