//! SNR and codebook-size sweeps, diversity-order fits and reference lines.

use std::time::{SystemTime, UNIX_EPOCH};

use crate::channel::{PhaseLevels, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::montecarlo::{
    estimate_outage, event_probability, lower_bound_outage, EventKind, EventSpec,
    LowerBoundEstimate, McOptions, OutageEstimate,
};

/// Default window of outage probabilities used for slope fits.
pub const DEFAULT_P_WINDOW: (f64, f64) = (1e-6, 1e-2);

pub const MIN_FIT_POINTS: usize = 3;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Stream id of the first block of sweep point `index`. Each point owns 2^32
/// consecutive substreams.
pub fn point_stream_base(index: usize) -> u64 {
    (index as u64) << 32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointOutcome {
    Estimate(OutageEstimate),
    /// Too few failures for a meaningful estimate; counts kept for the record.
    Censored {
        trials: u64,
        failures: u64,
    },
}

impl PointOutcome {
    pub fn estimate(&self) -> Option<&OutageEstimate> {
        match self {
            PointOutcome::Estimate(e) => Some(e),
            PointOutcome::Censored { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, PointOutcome::Censored { .. })
    }

    fn from_result(r: Result<OutageEstimate>) -> Result<Self> {
        match r {
            Ok(e) => Ok(PointOutcome::Estimate(e)),
            Err(Error::Censored {
                trials, failures, ..
            }) => Ok(PointOutcome::Censored { trials, failures }),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub rho_db: f64,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub timestamp_unix: u64,
    pub code_version: &'static str,
}

impl Provenance {
    fn now(seed: u64) -> Self {
        Self {
            seed,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            code_version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SystemConfig,
    pub points: Vec<SweepPoint>,
    pub provenance: Provenance,
}

impl SweepResult {
    /// Last uncensored point as `(rho_db, p_hat)`.
    pub fn last_uncensored(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .rev()
            .find_map(|p| p.outcome.estimate().map(|e| (p.rho_db, e.p_hat)))
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return domain("SNR grid is empty");
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return domain("SNR grid contains non-finite values");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("SNR grid must be strictly increasing");
    }
    Ok(())
}

/// `count` points from `min` to at most `max` in steps of `step`.
pub fn db_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !min.is_finite() || !max.is_finite() || max < min {
        return domain(format!("bad SNR range {min}..{max} step {step}"));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    // rounding to 1e-9 dB keeps printed grids free of accumulation noise
    Ok((0..count)
        .map(|i| ((min + step * i as f64) * 1e9).round() / 1e9)
        .collect())
}

/// One outage estimate per grid point (dB). Point `i` draws from its own
/// substream range; points that fail the rare-event guard are kept as censored.
pub fn sweep(cfg: &SystemConfig, rho_grid_db: &[f64], opts: &McOptions) -> Result<SweepResult> {
    cfg.validate()?;
    check_grid(rho_grid_db)?;
    let points = rho_grid_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let o = opts.with_stream_base(point_stream_base(i));
            let outcome = PointOutcome::from_result(estimate_outage(cfg, db_to_linear(db), &o))?;
            Ok(SweepPoint {
                rho_db: db,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if points.iter().all(|p| p.outcome.is_censored()) {
        return Err(Error::AllCensored);
    }
    Ok(SweepResult {
        config: *cfg,
        points,
        provenance: Provenance::now(opts.seed),
    })
}

/// Least-squares fit of `-log10 p` against `log10 ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    /// Fitted diversity order (minus the log-log slope).
    pub d_hat: f64,
    /// `-log10 p` at `ρ = 1` on the fitted line.
    pub intercept: f64,
    pub fit_lo_db: f64,
    pub fit_hi_db: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fits `p ∝ ρ^{-d}` through `(rho_db, p)` pairs; every `p` must be positive.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<SlopeEstimate> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            found: points.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    if points
        .iter()
        .any(|&(db, p)| p.is_nan() || p <= 0.0 || !db.is_finite())
    {
        return domain("power-law fit needs positive probabilities at finite SNRs");
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| -p.1.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return domain("power-law fit needs at least two distinct SNRs");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    Ok(SlopeEstimate {
        d_hat: slope,
        intercept,
        fit_lo_db: lo,
        fit_hi_db: hi,
        r_squared,
        points_used: points.len(),
    })
}

/// Diversity order from the uncensored sweep points whose estimate lies in
/// `p_window`.
pub fn fit_diversity(result: &SweepResult, p_window: (f64, f64)) -> Result<SlopeEstimate> {
    let (lo, hi) = p_window;
    let pts: Vec<(f64, f64)> = result
        .points
        .iter()
        .filter_map(|p| p.outcome.estimate().map(|e| (p.rho_db, e.p_hat)))
        .filter(|&(_, p)| p > 0.0 && p >= lo && p <= hi)
        .collect();
    fit_power_law(&pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSlope {
    /// Slope `(N+1)/2`, the two-level ceiling.
    L2Bound,
    /// Slope `N`, full diversity.
    Full,
}

impl ReferenceSlope {
    pub fn order(&self, n_elements: usize) -> f64 {
        match self {
            ReferenceSlope::L2Bound => (n_elements as f64 + 1.0) / 2.0,
            ReferenceSlope::Full => n_elements as f64,
        }
    }
}

/// Points on the line `p = p_anchor (ρ/ρ_anchor)^{-order}` over `rho_grid_db`.
pub fn reference_curves(
    n_elements: usize,
    case: ReferenceSlope,
    rho_grid_db: &[f64],
    anchor: (f64, f64),
) -> Vec<(f64, f64)> {
    let order = case.order(n_elements);
    let (a_db, a_p) = anchor;
    rho_grid_db
        .iter()
        .map(|&db| (db, a_p * 10f64.powf(-order * (db - a_db) / 10.0)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelsPoint {
    pub snr_db: f64,
    pub levels: PhaseLevels,
    pub outcome: PointOutcome,
}

/// Outage at fixed SNRs for every `L` in `levels`, followed by the perfect-phase
/// row, per SNR. All rows at one SNR reuse the same substreams, so they are
/// evaluated on common draws.
pub fn levels_sweep(
    cfg: &SystemConfig,
    snr_db: &[f64],
    levels: &[u32],
    opts: &McOptions,
) -> Result<Vec<LevelsPoint>> {
    cfg.validate()?;
    if snr_db.is_empty() || levels.is_empty() {
        return domain("levels sweep needs at least one SNR and one level count");
    }
    let mut rows = Vec::with_capacity(snr_db.len() * (levels.len() + 1));
    for (i, &db) in snr_db.iter().enumerate() {
        let o = opts.with_stream_base(point_stream_base(i));
        let kinds = levels
            .iter()
            .map(|&l| PhaseLevels::Discrete(l))
            .chain([PhaseLevels::Perfect]);
        for lv in kinds {
            let c = SystemConfig { levels: lv, ..*cfg };
            let outcome = PointOutcome::from_result(estimate_outage(&c, db_to_linear(db), &o))?;
            rows.push(LevelsPoint {
                snr_db: db,
                levels: lv,
                outcome,
            });
        }
    }
    if rows.iter().all(|r| r.outcome.is_censored()) {
        return Err(Error::AllCensored);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionalOutcome {
    Bound(LowerBoundEstimate),
    Censored { trials: u64, failures: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalPoint {
    pub rho_db: f64,
    pub event: EventSpec,
    pub event_probability: f64,
    pub outcome: ConditionalOutcome,
}

impl ConditionalPoint {
    pub fn bound(&self) -> Option<&LowerBoundEstimate> {
        match &self.outcome {
            ConditionalOutcome::Bound(b) => Some(b),
            ConditionalOutcome::Censored { .. } => None,
        }
    }
}

/// Boundary-event lower bound `P(ε) P(outage | ε)` over an SNR grid. The strip
/// width is `ρ^{-1/2}` unless `theta` overrides it.
pub fn conditional_sweep(
    cfg: &SystemConfig,
    kind: EventKind,
    theta: Option<f64>,
    rho_grid_db: &[f64],
    opts: &McOptions,
) -> Result<Vec<ConditionalPoint>> {
    cfg.validate()?;
    check_grid(rho_grid_db)?;
    let points = rho_grid_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let rho = db_to_linear(db);
            let event = match theta {
                Some(t) => EventSpec::new(kind, cfg.n_elements, t)?,
                None => EventSpec::for_snr(kind, cfg.n_elements, rho)?,
            };
            let o = opts.with_stream_base(point_stream_base(i));
            let outcome = match lower_bound_outage(cfg, &event, rho, &o) {
                Ok(b) => ConditionalOutcome::Bound(b),
                Err(Error::Censored {
                    trials, failures, ..
                }) => ConditionalOutcome::Censored { trials, failures },
                Err(e) => return Err(e),
            };
            Ok(ConditionalPoint {
                rho_db: db,
                event,
                event_probability: event_probability(&event),
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if points.iter().all(|p| p.bound().is_none()) {
        return Err(Error::AllCensored);
    }
    Ok(points)
}
