use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ris-sim",
    version,
    about = "Outage simulation for phase-quantized RIS links"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability over an SNR grid.
    Sweep(SweepArgs),
    /// Outage probability against the number of phase levels at fixed SNRs.
    LevelsSweep(LevelsSweepArgs),
    /// Two-level boundary-event lower bound over an SNR grid.
    Conditional(ConditionalArgs),
    /// Cascaded-gain CDF, its small-argument law, and reference slope lines.
    Analytic(AnalyticArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat key=value file; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV destination; a `.manifest` file is written next to it. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker thread cap. Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[arg(long)]
    pub n_elements: Option<usize>,
    #[arg(long)]
    pub rate_bpcu: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub omega_s: Option<f64>,
    #[arg(long)]
    pub omega_i: Option<f64>,
    #[arg(long)]
    pub direct_link: bool,
    /// Direct-path variance; requires --direct-link.
    #[arg(long)]
    pub omega_d: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    /// Magnitudes and uniform phase errors drawn from their closed-form laws.
    Shortcut,
    /// Complex Gaussian hops, cascaded and quantized.
    Full,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub trials: Option<u64>,
    /// Falls back to the config file, then RIS_SIM_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub block_size: Option<u64>,
    #[arg(long, value_enum)]
    pub sampler: Option<Sampler>,
    /// Report points with fewer than 10 failures instead of censoring them.
    #[arg(long)]
    pub allow_sparse: bool,
}

#[derive(Debug, Args)]
pub struct SnrGridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db_max: Option<f64>,
    #[arg(long)]
    pub snr_db_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    /// Integer >= 2 or "perfect".
    #[arg(long)]
    pub levels: Option<String>,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub grid: SnrGridArgs,
}

#[derive(Debug, Args)]
pub struct LevelsSweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    #[arg(long)]
    pub levels_min: Option<u32>,
    #[arg(long)]
    pub levels_max: Option<u32>,
    /// Comma-separated SNRs in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Vec<f64>,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EventArg {
    Eps1,
    Eps2,
}

#[derive(Debug, Args)]
pub struct ConditionalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    /// Must be 2.
    #[arg(long)]
    pub levels: Option<String>,
    /// Defaults to eps1 for two elements, eps2 otherwise.
    #[arg(long, value_enum)]
    pub event: Option<EventArg>,
    /// Fixed strip width in radians instead of ρ^{-1/2}.
    #[arg(long)]
    pub theta: Option<f64>,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub grid: SnrGridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyticMode {
    /// `x,cdf,approx` over an x grid.
    X,
    /// `rho_db,threshold,cdf,approx` with threshold `ε0/ρ`.
    Rho,
    /// `rho_db,value` for a reference slope line.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    Full,
    L2Bound,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    #[arg(long, value_enum)]
    pub mode: Option<AnalyticMode>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic x spacing; needs a positive --x-min.
    #[arg(long)]
    pub log_spacing: bool,
    #[command(flatten)]
    pub grid: SnrGridArgs,
    #[arg(long, value_enum)]
    pub reference: Option<ReferenceArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub anchor_db: Option<f64>,
    #[arg(long)]
    pub anchor_p: Option<f64>,
    /// Anchor the line at the last uncensored row of a sweep CSV.
    #[arg(long)]
    pub anchor_from: Option<std::path::PathBuf>,
}
