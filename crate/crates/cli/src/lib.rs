//! Command-line front end for `ris-core`: sweeps, level sweeps, boundary-event
//! experiments and analytic curves, written as CSV with a manifest per file.

pub mod args;
pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use crate::args::{Cli, Command, RunArgs};
use crate::commands::CommandOutput;
use crate::config::{ConfigFile, Resolver};
use crate::manifest::{manifest_path, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ALL_CENSORED: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("every point was censored; raise --trials or pass --allow-sparse")]
    AllCensored,
    #[error("{0}")]
    Numeric(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::AllCensored => EXIT_ALL_CENSORED,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<ris_core::Error> for CliError {
    fn from(e: ris_core::Error) -> Self {
        use ris_core::Error as E;
        match e {
            E::InvalidConfig(m) => CliError::Usage(m),
            E::AllCensored | E::Censored { .. } => CliError::AllCensored,
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl Command {
    fn run_args(&self) -> &RunArgs {
        match self {
            Command::Sweep(a) => &a.run,
            Command::LevelsSweep(a) => &a.run,
            Command::Conditional(a) => &a.run,
            Command::Analytic(a) => &a.run,
        }
    }
}

fn dispatch(cmd: &Command, resolver: Resolver) -> Result<CommandOutput, CliError> {
    match cmd {
        Command::Sweep(a) => commands::cmd_sweep(a, resolver),
        Command::LevelsSweep(a) => commands::cmd_levels_sweep(a, resolver),
        Command::Conditional(a) => commands::cmd_conditional(a, resolver),
        Command::Analytic(a) => commands::cmd_analytic(a, resolver),
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a parsed command: resolves settings, computes, then writes the CSV
/// and its manifest (or the CSV alone to stdout when no `--out` is given).
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let run = cli.command.run_args();
    let file = match &run.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let resolver = Resolver::new(file);
    let output = match run.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build a {n}-thread pool: {e}")))?
            .install(|| dispatch(&cli.command, resolver))?,
        None => dispatch(&cli.command, resolver)?,
    };
    match &run.out {
        None => {
            let stdout = std::io::stdout();
            stdout
                .lock()
                .write_all(output.csv.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
        Some(out) => {
            write_file(out, &output.csv)?;
            let manifest = RunManifest {
                command: output.command.to_string(),
                config_digest: output.resolver.digest(output.command),
                seed: output.seed,
                output_paths: vec![out.clone()],
                duration_s: start.elapsed().as_secs_f64(),
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                notes: output
                    .notes
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
                config: output
                    .resolver
                    .resolved()
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
            };
            write_file(&manifest_path(out), &manifest.to_text())?;
        }
    }
    Ok(())
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("ris-sim: {e}");
            e.exit_code()
        }
    }
}
