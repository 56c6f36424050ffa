//! Subcommand drivers. Each returns the CSV text plus what the manifest needs.

use std::fmt::Write as _;
use std::path::Path;

use ris_core::analysis::{
    conditional_sweep, db_grid, db_to_linear, levels_sweep, reference_curves, sweep,
    ConditionalOutcome, PointOutcome, ReferenceSlope,
};
use ris_core::channel::{PhaseLevels, SystemConfig};
use ris_core::link::OutageThreshold;
use ris_core::montecarlo::{EventKind, McOptions, SamplingPath, DEFAULT_BLOCK_SIZE};
use ris_core::specfun::{cdf_gsq, cdf_gsq_small_arg};

use crate::args::{
    AnalyticArgs, AnalyticMode, ConditionalArgs, EventArg, LevelsSweepArgs, LinkArgs, McArgs,
    ReferenceArg, Sampler, SnrGridArgs, SweepArgs,
};
use crate::config::Resolver;
use crate::CliError;

pub const SWEEP_HEADER: &str = "rho_db,trials,failures,p_hat,ci_low,ci_high,censored";
pub const LEVELS_HEADER: &str = "snr_db,levels,p_hat,ci_low,ci_high,censored";
pub const CONDITIONAL_HEADER: &str = "rho_db,event_prob,cond_p_hat,lower_bound,ci_low,ci_high";
pub const ANALYTIC_X_HEADER: &str = "x,cdf,approx";
pub const ANALYTIC_RHO_HEADER: &str = "rho_db,threshold,cdf,approx";
pub const REFERENCE_HEADER: &str = "rho_db,value";

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_N_ELEMENTS: usize = 2;
pub const DEFAULT_LEVELS: PhaseLevels = PhaseLevels::Discrete(3);
/// 0 to 40 dB in 2.5 dB steps.
pub const DEFAULT_SNR_GRID: (f64, f64, f64) = (0.0, 40.0, 2.5);
pub const DEFAULT_CONDITIONAL_GRID: (f64, f64, f64) = (20.0, 40.0, 10.0);
pub const DEFAULT_LEVELS_SNR_DB: [f64; 2] = [20.0, 30.0];

/// Everything a finished command hands back for writing.
#[derive(Debug)]
pub struct CommandOutput {
    pub command: &'static str,
    pub csv: String,
    pub resolver: Resolver,
    pub seed: Option<u64>,
    /// Derived quantities recorded in the manifest only.
    pub notes: Vec<(&'static str, String)>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Plain `Display` formatting: shortest round-trip, no locale, no grouping.
fn num(x: f64) -> String {
    format!("{x}")
}

fn resolve_levels(
    r: &mut Resolver,
    flag: Option<&str>,
    default: PhaseLevels,
) -> Result<PhaseLevels, CliError> {
    let parsed = flag
        .map(|s| s.parse::<PhaseLevels>().map_err(|e| usage(e.to_string())))
        .transpose()?;
    r.value("levels", parsed, default)
}

fn resolve_link(
    r: &mut Resolver,
    a: &LinkArgs,
    levels: PhaseLevels,
) -> Result<SystemConfig, CliError> {
    let n = r.value("n-elements", a.n_elements, DEFAULT_N_ELEMENTS)?;
    let base = SystemConfig::new(n, levels);
    let mut cfg = SystemConfig {
        rate_bpcu: r.value("rate-bpcu", a.rate_bpcu, base.rate_bpcu)?,
        eta: r.value("eta", a.eta, base.eta)?,
        omega_s: r.value("omega-s", a.omega_s, base.omega_s)?,
        omega_i: r.value("omega-i", a.omega_i, base.omega_i)?,
        ..base
    };
    let direct = r.switch("direct-link", a.direct_link)?;
    let omega_d = r.optional("omega-d", a.omega_d)?;
    if omega_d.is_some() && !direct {
        return Err(usage("--omega-d requires --direct-link"));
    }
    if direct {
        cfg = cfg.with_direct_link(r.value("omega-d", omega_d, base.omega_d)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_mc(r: &mut Resolver, a: &McArgs) -> Result<McOptions, CliError> {
    let trials = r.value("trials", a.trials, DEFAULT_TRIALS)?;
    let seed = r.seed(a.seed)?;
    let block = r.value("block-size", a.block_size, DEFAULT_BLOCK_SIZE)?;
    let sampler = match a.sampler {
        Some(s) => Some(s),
        None => r
            .optional::<String>("sampler", None)?
            .map(|s| match s.as_str() {
                "shortcut" => Ok(Sampler::Shortcut),
                "full" => Ok(Sampler::Full),
                other => Err(usage(format!("unknown sampler `{other}`"))),
            })
            .transpose()?,
    }
    .unwrap_or(Sampler::Shortcut);
    r.record(
        "sampler",
        match sampler {
            Sampler::Shortcut => "shortcut",
            Sampler::Full => "full",
        },
    );
    let allow_sparse = r.switch("allow-sparse", a.allow_sparse)?;
    if trials == 0 || block == 0 {
        return Err(usage("--trials and --block-size must be positive"));
    }
    let path = match sampler {
        Sampler::Shortcut => SamplingPath::PhaseErrorShortcut,
        Sampler::Full => SamplingPath::FullChannel,
    };
    Ok(McOptions::new(trials, seed)
        .with_block_size(block)
        .with_path(path)
        .allow_sparse(allow_sparse))
}

fn resolve_grid(
    r: &mut Resolver,
    a: &SnrGridArgs,
    default: (f64, f64, f64),
) -> Result<Vec<f64>, CliError> {
    let min = r.value("snr-db-min", a.snr_db_min, default.0)?;
    let max = r.value("snr-db-max", a.snr_db_max, default.1)?;
    let step = r.value("snr-db-step", a.snr_db_step, default.2)?;
    db_grid(min, max, step).map_err(|e| usage(e.to_string()))
}

fn epsilon_note(cfg: &SystemConfig) -> (&'static str, String) {
    ("epsilon0", num(OutageThreshold::from_config(cfg).epsilon0))
}

pub fn cmd_sweep(a: &SweepArgs, mut r: Resolver) -> Result<CommandOutput, CliError> {
    let levels = resolve_levels(&mut r, a.levels.as_deref(), DEFAULT_LEVELS)?;
    let cfg = resolve_link(&mut r, &a.link, levels)?;
    let opts = resolve_mc(&mut r, &a.mc)?;
    let grid = resolve_grid(&mut r, &a.grid, DEFAULT_SNR_GRID)?;
    let result = sweep(&cfg, &grid, &opts)?;
    let mut csv = format!("{SWEEP_HEADER}\n");
    for p in &result.points {
        match p.outcome {
            PointOutcome::Estimate(e) => writeln!(
                csv,
                "{},{},{},{},{},{},0",
                num(p.rho_db),
                e.trials,
                e.failures,
                num(e.p_hat),
                num(e.ci_low),
                num(e.ci_high)
            ),
            PointOutcome::Censored { trials, failures } => {
                writeln!(csv, "{},{trials},{failures},,,,1", num(p.rho_db))
            }
        }
        .expect("writing to a String cannot fail");
    }
    Ok(CommandOutput {
        command: "sweep",
        csv,
        resolver: r,
        seed: Some(opts.seed),
        notes: vec![
            epsilon_note(&cfg),
            (
                "timestamp_unix",
                result.provenance.timestamp_unix.to_string(),
            ),
        ],
    })
}

pub fn cmd_levels_sweep(a: &LevelsSweepArgs, mut r: Resolver) -> Result<CommandOutput, CliError> {
    let lo = r.value("levels-min", a.levels_min, 2u32)?;
    let hi = r.value("levels-max", a.levels_max, 8u32)?;
    if lo < 2 || hi < lo {
        return Err(usage(format!(
            "need 2 <= --levels-min <= --levels-max, got {lo}..{hi}"
        )));
    }
    let cfg = resolve_link(&mut r, &a.link, PhaseLevels::Discrete(lo))?;
    let opts = resolve_mc(&mut r, &a.mc)?;
    let snrs = r.list("snr-db", a.snr_db.clone(), &DEFAULT_LEVELS_SNR_DB)?;
    if snrs.is_empty() || snrs.iter().any(|x| !x.is_finite()) {
        return Err(usage("--snr-db needs finite values"));
    }
    let levels: Vec<u32> = (lo..=hi).collect();
    let rows = levels_sweep(&cfg, &snrs, &levels, &opts)?;
    let mut csv = format!("{LEVELS_HEADER}\n");
    for row in &rows {
        match row.outcome {
            PointOutcome::Estimate(e) => writeln!(
                csv,
                "{},{},{},{},{},0",
                num(row.snr_db),
                row.levels,
                num(e.p_hat),
                num(e.ci_low),
                num(e.ci_high)
            ),
            PointOutcome::Censored { .. } => {
                writeln!(csv, "{},{},,,,1", num(row.snr_db), row.levels)
            }
        }
        .expect("writing to a String cannot fail");
    }
    Ok(CommandOutput {
        command: "levels-sweep",
        csv,
        resolver: r,
        seed: Some(opts.seed),
        notes: vec![epsilon_note(&cfg)],
    })
}

pub fn cmd_conditional(a: &ConditionalArgs, mut r: Resolver) -> Result<CommandOutput, CliError> {
    let levels = resolve_levels(&mut r, a.levels.as_deref(), PhaseLevels::Discrete(2))?;
    if levels != PhaseLevels::Discrete(2) {
        return Err(usage(format!(
            "conditional experiments need --levels 2, got {levels}"
        )));
    }
    let cfg = resolve_link(&mut r, &a.link, levels)?;
    let opts = resolve_mc(&mut r, &a.mc)?;
    let grid = resolve_grid(&mut r, &a.grid, DEFAULT_CONDITIONAL_GRID)?;
    let default_event = if cfg.n_elements == 2 { "eps1" } else { "eps2" };
    let event = match a.event {
        Some(EventArg::Eps1) => "eps1".to_string(),
        Some(EventArg::Eps2) => "eps2".to_string(),
        None => r
            .optional::<String>("event", None)?
            .unwrap_or_else(|| default_event.into()),
    };
    let kind = match event.as_str() {
        "eps1" => EventKind::Eps1,
        "eps2" => EventKind::Eps2,
        other => return Err(usage(format!("unknown event `{other}`"))),
    };
    r.record("event", &event);
    if kind == EventKind::Eps1 && cfg.n_elements != 2 {
        return Err(usage("eps1 is defined for --n-elements 2 only"));
    }
    let theta = r.optional("theta", a.theta)?;
    if let Some(t) = theta {
        if !(t > 0.0 && t <= std::f64::consts::FRAC_PI_2) {
            return Err(usage(format!("--theta must lie in (0, π/2], got {t}")));
        }
    }
    let points = conditional_sweep(&cfg, kind, theta, &grid, &opts)?;
    let mut csv = format!("{CONDITIONAL_HEADER}\n");
    for p in &points {
        match p.outcome {
            ConditionalOutcome::Bound(b) => {
                let (lo, hi) = b.interval();
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    num(p.rho_db),
                    num(p.event_probability),
                    num(b.conditional.p_hat),
                    num(b.value),
                    num(lo),
                    num(hi)
                )
            }
            ConditionalOutcome::Censored { .. } => {
                writeln!(csv, "{},{},,,,", num(p.rho_db), num(p.event_probability))
            }
        }
        .expect("writing to a String cannot fail");
    }
    Ok(CommandOutput {
        command: "conditional",
        csv,
        resolver: r,
        seed: Some(opts.seed),
        notes: vec![epsilon_note(&cfg)],
    })
}

fn x_grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if points == 0 || !min.is_finite() || !max.is_finite() || max < min || min < 0.0 {
        return Err(usage(format!(
            "bad x grid {min}..{max} with {points} points"
        )));
    }
    if log && min <= 0.0 {
        return Err(usage("--log-spacing needs a positive --x-min"));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            if i == points - 1 {
                max
            } else if log {
                min * (max / min).powf(f)
            } else {
                min + (max - min) * f
            }
        })
        .collect())
}

/// Last uncensored `(rho_db, p_hat)` row of a sweep CSV.
pub fn anchor_from_sweep_csv(path: &Path) -> Result<(f64, f64), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_HEADER) {
        return Err(usage(format!("{} is not a sweep CSV", path.display())));
    }
    lines
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 || f[6] != "0" {
                return None;
            }
            Some((f[0].parse().ok()?, f[3].parse().ok()?))
        })
        .next_back()
        .ok_or_else(|| usage(format!("{} has no uncensored rows", path.display())))
}

pub fn cmd_analytic(a: &AnalyticArgs, mut r: Resolver) -> Result<CommandOutput, CliError> {
    let mode = match a.mode {
        Some(m) => m,
        None => match r.optional::<String>("mode", None)?.as_deref() {
            None | Some("x") => AnalyticMode::X,
            Some("rho") => AnalyticMode::Rho,
            Some("reference") => AnalyticMode::Reference,
            Some(other) => return Err(usage(format!("unknown mode `{other}`"))),
        },
    };
    let mut csv = String::new();
    let mut notes = Vec::new();
    match mode {
        AnalyticMode::X => {
            r.record("mode", "x");
            let min = r.value("x-min", a.x_min, 0.0)?;
            let max = r.value("x-max", a.x_max, 1.0)?;
            let points = r.value("points", a.points, 101usize)?;
            let log = r.switch("log-spacing", a.log_spacing)?;
            csv.push_str(ANALYTIC_X_HEADER);
            csv.push('\n');
            for x in x_grid(min, max, points, log)? {
                let c = cdf_gsq(x)?;
                writeln!(csv, "{},{},{}", num(x), num(c), num(cdf_gsq_small_arg(x)))
                    .expect("String write");
            }
        }
        AnalyticMode::Rho => {
            r.record("mode", "rho");
            let cfg = resolve_link(&mut r, &a.link, PhaseLevels::Perfect)?;
            if cfg.direct_link {
                return Err(usage("the analytic curve covers the reflected link only"));
            }
            let grid = resolve_grid(&mut r, &a.grid, DEFAULT_SNR_GRID)?;
            let thr = OutageThreshold::from_config(&cfg);
            notes.push(epsilon_note(&cfg));
            csv.push_str(ANALYTIC_RHO_HEADER);
            csv.push('\n');
            for db in grid {
                let t = thr.at(db_to_linear(db));
                writeln!(
                    csv,
                    "{},{},{},{}",
                    num(db),
                    num(t),
                    num(cdf_gsq(t)?),
                    num(cdf_gsq_small_arg(t))
                )
                .expect("String write");
            }
        }
        AnalyticMode::Reference => {
            r.record("mode", "reference");
            let n = r.value("n-elements", a.link.n_elements, DEFAULT_N_ELEMENTS)?;
            if n == 0 {
                return Err(usage("--n-elements must be at least 1"));
            }
            let case = match a.reference {
                Some(c) => c,
                None => match r.optional::<String>("reference", None)?.as_deref() {
                    Some("full") => ReferenceArg::Full,
                    Some("l2-bound") => ReferenceArg::L2Bound,
                    Some(other) => return Err(usage(format!("unknown reference `{other}`"))),
                    None => return Err(usage("reference mode needs --reference full|l2-bound")),
                },
            };
            r.record(
                "reference",
                match case {
                    ReferenceArg::Full => "full",
                    ReferenceArg::L2Bound => "l2-bound",
                },
            );
            let anchor = match &a.anchor_from {
                Some(path) => {
                    let (db, p) = anchor_from_sweep_csv(path)?;
                    (
                        r.value("anchor-db", None, db)?,
                        r.value("anchor-p", None, p)?,
                    )
                }
                None => {
                    let db = r.optional("anchor-db", a.anchor_db)?;
                    let p = r.optional("anchor-p", a.anchor_p)?;
                    match (db, p) {
                        (Some(db), Some(p)) if p > 0.0 && db.is_finite() => (db, p),
                        (Some(_), Some(p)) => {
                            return Err(usage(format!(
                                "anchor probability must be positive, got {p}"
                            )))
                        }
                        _ => return Err(usage(
                            "reference mode needs --anchor-from or both --anchor-db and --anchor-p",
                        )),
                    }
                }
            };
            let grid = resolve_grid(&mut r, &a.grid, DEFAULT_SNR_GRID)?;
            let slope = match case {
                ReferenceArg::Full => ReferenceSlope::Full,
                ReferenceArg::L2Bound => ReferenceSlope::L2Bound,
            };
            csv.push_str(REFERENCE_HEADER);
            csv.push('\n');
            for (db, v) in reference_curves(n, slope, &grid, anchor) {
                writeln!(csv, "{},{}", num(db), num(v)).expect("String write");
            }
        }
    }
    Ok(CommandOutput {
        command: "analytic",
        csv,
        resolver: r,
        seed: None,
        notes,
    })
}
