//! Outage-probability estimation.
//!
//! Trials are split into fixed-size blocks and block `b` draws from substream
//! `(seed, stream_base + b)`. Blocks are evaluated in parallel and only integer
//! failure counts are reduced, so an estimate depends on `(seed, trials,
//! block_size, stream_base)` and nothing else.
//!
//! Two sampling paths are available. The full-channel path draws every complex
//! coefficient, derives optimal phases and quantizes them. The shortcut draws
//! each cascaded magnitude from the double-Rayleigh law and each residual phase
//! error from its uniform law directly. Both consume a fixed number of variates
//! per trial regardless of the quantizer, so runs that differ only in `L` see the
//! same magnitudes.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::channel::{
    draw_realization_with, sample_cascaded_magnitude, PhaseLevels, RngStream, SystemConfig,
};
use crate::error::{domain, Error, Result};
use crate::link::{aggregate, outage_indicator, rate_threshold, OutageThreshold};
use crate::quantizer::{
    cascade_and_quantize, check_strip_width, strip_error, uniform_error, StripSide,
};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Estimates with fewer failures than this are censored unless overridden.
pub const MIN_FAILURES: u64 = 10;

pub const DEFAULT_BLOCK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingPath {
    FullChannel,
    PhaseErrorShortcut,
}

/// Trial budget and stream layout of one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    pub block_size: u64,
    pub path: SamplingPath,
    /// Return sparse estimates instead of [`Error::Censored`].
    pub allow_sparse: bool,
    /// Stream id of the first block; sweeps give each point its own range.
    pub stream_base: u64,
}

impl McOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            block_size: DEFAULT_BLOCK_SIZE,
            path: SamplingPath::PhaseErrorShortcut,
            allow_sparse: false,
            stream_base: 0,
        }
    }

    pub fn with_path(mut self, path: SamplingPath) -> Self {
        self.path = path;
        self
    }

    pub fn with_block_size(mut self, block_size: u64) -> Self {
        self.block_size = block_size;
        self
    }

    pub fn with_stream_base(mut self, stream_base: u64) -> Self {
        self.stream_base = stream_base;
        self
    }

    pub fn allow_sparse(mut self, allow: bool) -> Self {
        self.allow_sparse = allow;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return domain("trials must be at least 1");
        }
        if self.block_size == 0 {
            return domain("block size must be at least 1");
        }
        Ok(())
    }
}

/// A binomial frequency estimate with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub rho: f64,
}

impl OutageEstimate {
    pub fn from_counts(trials: u64, failures: u64, seed: u64, rho: f64) -> Self {
        assert!(
            trials > 0 && failures <= trials,
            "inconsistent counts {failures}/{trials}"
        );
        let p_hat = failures as f64 / trials as f64;
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        Self {
            trials,
            failures,
            p_hat,
            ci_low,
            ci_high,
            seed,
            rho,
        }
    }

    /// Binomial standard error `sqrt(p(1-p)/n)` at the point estimate.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval for `failures` successes in `trials`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = (center - half).max(0.0).min(p);
    let hi = (center + half).min(1.0).max(p);
    (lo, hi)
}

fn count_blocks<F>(opts: &McOptions, per_block: F) -> Result<u64>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<u64> + Sync,
{
    opts.validate()?;
    let blocks = opts.trials.div_ceil(opts.block_size);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = opts.block_size.min(opts.trials - b * opts.block_size);
            let mut rng = RngStream::new(opts.seed, opts.stream_base + b).rng();
            per_block(&mut rng, n)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn finish(opts: &McOptions, failures: u64, rho: f64) -> Result<OutageEstimate> {
    if failures < MIN_FAILURES && !opts.allow_sparse {
        return Err(Error::Censored {
            trials: opts.trials,
            failures,
            required: MIN_FAILURES,
        });
    }
    Ok(OutageEstimate::from_counts(
        opts.trials,
        failures,
        opts.seed,
        rho,
    ))
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_nan() || rho <= 0.0 {
        return domain(format!("transmit SNR must be positive, got {rho}"));
    }
    Ok(())
}

/// Decides outage from the aggregate `(re, im)` and the direct-path gain.
#[derive(Clone, Copy)]
struct OutageTest {
    /// Without direct link: `ε0 / ρ`. With: `(2^R0 - 1) / ρ`.
    threshold: f64,
    /// `η sqrt(Ω_S Ω_I)` when a direct link is present.
    direct_scale: Option<f64>,
}

impl OutageTest {
    fn new(cfg: &SystemConfig, rho: f64) -> Self {
        if cfg.direct_link {
            Self {
                threshold: rate_threshold(cfg) / rho,
                direct_scale: Some(cfg.eta * (cfg.omega_s * cfg.omega_i).sqrt()),
            }
        } else {
            Self {
                threshold: OutageThreshold::from_config(cfg).at(rho),
                direct_scale: None,
            }
        }
    }

    #[inline]
    fn is_outage(&self, re: f64, im: f64, direct: f64) -> bool {
        match self.direct_scale {
            None => re * re + im * im < self.threshold,
            Some(s) => {
                let a = direct + s * re;
                let b = s * im;
                a * a + b * b < self.threshold
            }
        }
    }
}

#[inline]
fn direct_magnitude<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> f64 {
    if cfg.direct_link {
        let e: f64 = rng.sample(Exp1);
        (cfg.omega_d * e).sqrt()
    } else {
        0.0
    }
}

fn shortcut_block(cfg: &SystemConfig, test: OutageTest, rng: &mut ChaCha8Rng, n: u64) -> u64 {
    let half = cfg.levels.max_phase_error();
    let perfect = matches!(cfg.levels, PhaseLevels::Perfect);
    let mut failures = 0;
    for _ in 0..n {
        let (mut re, mut im) = (0.0, 0.0);
        for _ in 0..cfg.n_elements {
            let m = sample_cascaded_magnitude(rng);
            let theta = uniform_error(half, rng);
            if perfect {
                re += m;
            } else {
                let (s, c) = theta.sin_cos();
                re += m * c;
                im += m * s;
            }
        }
        let d = direct_magnitude(cfg, rng);
        failures += test.is_outage(re, im, d) as u64;
    }
    failures
}

fn full_channel_block(cfg: &SystemConfig, rho: f64, rng: &mut ChaCha8Rng, n: u64) -> Result<u64> {
    let mut failures = 0;
    for _ in 0..n {
        let real = draw_realization_with(cfg, rng);
        let coeffs = cascade_and_quantize(cfg, &real)?;
        let g = aggregate(&coeffs)?;
        failures += outage_indicator(cfg, &g, rho, real.h_sd)? as u64;
    }
    Ok(failures)
}

/// Frequency estimate of `P(outage)` at transmit SNR `rho` (linear).
pub fn estimate_outage(cfg: &SystemConfig, rho: f64, opts: &McOptions) -> Result<OutageEstimate> {
    cfg.validate()?;
    check_rho(rho)?;
    let failures = match opts.path {
        SamplingPath::PhaseErrorShortcut => {
            let test = OutageTest::new(cfg, rho);
            count_blocks(opts, |rng, n| Ok(shortcut_block(cfg, test, rng, n)))?
        }
        SamplingPath::FullChannel => {
            count_blocks(opts, |rng, n| full_channel_block(cfg, rho, rng, n))?
        }
    };
    finish(opts, failures, rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Two elements, one error in each boundary strip.
    Eps1,
    /// N elements, exactly one error in the low strip and all others in the high strip.
    Eps2,
}

/// A boundary-strip event of the two-level quantizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventSpec {
    pub kind: EventKind,
    pub n_elements: usize,
    /// Strip width.
    pub theta: f64,
}

impl EventSpec {
    pub fn new(kind: EventKind, n_elements: usize, theta: f64) -> Result<Self> {
        if n_elements < 2 {
            return domain(format!("boundary events need N >= 2, got {n_elements}"));
        }
        if kind == EventKind::Eps1 && n_elements != 2 {
            return domain(format!(
                "the two-element event needs N = 2, got {n_elements}"
            ));
        }
        check_strip_width(theta)?;
        Ok(Self {
            kind,
            n_elements,
            theta,
        })
    }

    /// Strip width `θ = ρ^{-1/2}`.
    pub fn for_snr(kind: EventKind, n_elements: usize, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Self::new(kind, n_elements, rho.sqrt().recip())
    }
}

/// Closed-form probability of the event under i.i.d. uniform errors on
/// [-π/2, π/2]: each strip carries mass `θ/π`, and the N placements of the
/// low-strip element are disjoint.
pub fn event_probability(event: &EventSpec) -> f64 {
    let q = event.theta / PI;
    match event.kind {
        EventKind::Eps1 => 2.0 * q * q,
        EventKind::Eps2 => event.n_elements as f64 * q.powi(event.n_elements as i32),
    }
}

fn check_two_level(cfg: &SystemConfig, event: &EventSpec) -> Result<()> {
    if cfg.levels != PhaseLevels::Discrete(2) {
        return domain(format!(
            "boundary events need L = 2, config has L = {}",
            cfg.levels
        ));
    }
    if cfg.n_elements != event.n_elements {
        return domain(format!(
            "event is for N = {}, config has N = {}",
            event.n_elements, cfg.n_elements
        ));
    }
    Ok(())
}

/// Outage frequency conditioned on the event: the low-strip element is chosen
/// uniformly, its error drawn uniformly from the low strip and every other
/// error from the high strip; magnitudes are unconditional. Always uses the
/// shortcut sampler.
pub fn estimate_conditional_outage(
    cfg: &SystemConfig,
    event: &EventSpec,
    rho: f64,
    opts: &McOptions,
) -> Result<OutageEstimate> {
    cfg.validate()?;
    check_rho(rho)?;
    check_two_level(cfg, event)?;
    let test = OutageTest::new(cfg, rho);
    let n_el = cfg.n_elements;
    let width = event.theta;
    let failures = count_blocks(opts, |rng, n| {
        let mut failures = 0;
        for _ in 0..n {
            let low = rng.random_range(0..n_el);
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..n_el {
                let m = sample_cascaded_magnitude(rng);
                let side = if k == low {
                    StripSide::Low
                } else {
                    StripSide::High
                };
                let (s, c) = strip_error(side, width, rng).sin_cos();
                re += m * c;
                im += m * s;
            }
            let d = direct_magnitude(cfg, rng);
            failures += test.is_outage(re, im, d) as u64;
        }
        Ok(failures)
    })?;
    finish(opts, failures, rho)
}

/// `P(event) · P(outage | event)`, a lower bound on the two-level outage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundEstimate {
    pub event_probability: f64,
    pub conditional: OutageEstimate,
    pub value: f64,
}

impl LowerBoundEstimate {
    /// Wilson interval of the conditional estimate scaled by the event probability.
    pub fn interval(&self) -> (f64, f64) {
        (
            self.event_probability * self.conditional.ci_low,
            self.event_probability * self.conditional.ci_high,
        )
    }
}

pub fn lower_bound_outage(
    cfg: &SystemConfig,
    event: &EventSpec,
    rho: f64,
    opts: &McOptions,
) -> Result<LowerBoundEstimate> {
    let conditional = estimate_conditional_outage(cfg, event, rho, opts)?;
    let event_probability = event_probability(event);
    Ok(LowerBoundEstimate {
        event_probability,
        conditional,
        value: event_probability * conditional.p_hat,
    })
}

/// Hit count of the N-element boundary event under unconditional two-level
/// phase errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventFrequency {
    pub trials: u64,
    pub hits: u64,
}

impl EventFrequency {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }
}

/// True when exactly one error lies in the low strip and every other one in the
/// high strip.
pub fn in_boundary_event(errors: &[f64], theta: f64) -> bool {
    let lo_edge = -PI / 2.0 + theta;
    let hi_edge = PI / 2.0 - theta;
    let lows = errors.iter().filter(|&&e| e <= lo_edge).count();
    let highs = errors.iter().filter(|&&e| e >= hi_edge).count();
    lows == 1 && highs == errors.len() - 1
}

pub fn estimate_event_frequency(
    n_elements: usize,
    theta: f64,
    opts: &McOptions,
) -> Result<EventFrequency> {
    EventSpec::new(EventKind::Eps2, n_elements, theta)?;
    let hits = count_blocks(opts, |rng, n| {
        let mut errors = vec![0.0; n_elements];
        let mut hits = 0;
        for _ in 0..n {
            for e in errors.iter_mut() {
                *e = uniform_error(PI / 2.0, rng);
            }
            hits += in_boundary_event(&errors, theta) as u64;
        }
        Ok(hits)
    })?;
    Ok(EventFrequency {
        trials: opts.trials,
        hits,
    })
}
