//! Flat key=value configuration files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::CliError;

pub const SEED_ENV: &str = "RIS_SIM_SEED";
pub const DEFAULT_SEED: u64 = 1;

/// Keys a config file may set. Underscores are accepted in place of hyphens.
pub const KNOWN_KEYS: &[&str] = &[
    "n-elements",
    "levels",
    "levels-min",
    "levels-max",
    "rate-bpcu",
    "eta",
    "omega-s",
    "omega-i",
    "direct-link",
    "omega-d",
    "trials",
    "seed",
    "block-size",
    "sampler",
    "allow-sparse",
    "snr-db-min",
    "snr-db-max",
    "snr-db-step",
    "snr-db",
    "event",
    "theta",
    "mode",
    "x-min",
    "x-max",
    "points",
    "log-spacing",
    "reference",
    "anchor-db",
    "anchor-p",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Resolves each setting from flag, then config file, then default, and
/// records the outcome for the manifest.
#[derive(Debug, Default)]
pub struct Resolver {
    file: ConfigFile,
    resolved: BTreeMap<&'static str, String>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError>
where
    T::Err: Display,
{
    raw.parse()
        .map_err(|e| CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`: {e}")))
}

impl Resolver {
    pub fn new(file: ConfigFile) -> Self {
        Self {
            file,
            resolved: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, key: &'static str, value: impl Display) {
        self.resolved.insert(key, value.to_string());
    }

    pub fn optional<T: FromStr + Display>(
        &mut self,
        key: &'static str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let v = match flag {
            Some(v) => Some(v),
            None => self
                .file
                .get(key)
                .map(|raw| parse_value(key, raw))
                .transpose()?,
        };
        if let Some(v) = &v {
            self.record(key, v);
        }
        Ok(v)
    }

    pub fn value<T: FromStr + Display>(
        &mut self,
        key: &'static str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let v = self.optional(key, flag)?.unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    /// A boolean switch: set by the flag or by `true`/`false` in the file.
    pub fn switch(&mut self, key: &'static str, flag: bool) -> Result<bool, CliError> {
        let v = flag
            || self
                .file
                .get(key)
                .map(|raw| parse_value::<bool>(key, raw))
                .transpose()?
                .unwrap_or(false);
        self.record(key, v);
        Ok(v)
    }

    /// Comma-separated list of reals.
    pub fn list(
        &mut self,
        key: &'static str,
        flag: Vec<f64>,
        default: &[f64],
    ) -> Result<Vec<f64>, CliError> {
        let v = if !flag.is_empty() {
            flag
        } else if let Some(raw) = self.file.get(key) {
            raw.split(',')
                .map(|s| parse_value::<f64>(key, s.trim()))
                .collect::<Result<_, _>>()?
        } else {
            default.to_vec()
        };
        let joined = v
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        self.record(key, joined);
        Ok(v)
    }

    /// Seed precedence: flag, config file, environment, built-in default.
    pub fn seed(&mut self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = self.optional("seed", flag)? {
            return Ok(s);
        }
        let seed = match std::env::var(SEED_ENV) {
            Ok(raw) => raw
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("{SEED_ENV}=`{raw}` is not a seed: {e}")))?,
            Err(_) => DEFAULT_SEED,
        };
        self.record("seed", seed);
        Ok(seed)
    }

    pub fn resolved(&self) -> &BTreeMap<&'static str, String> {
        &self.resolved
    }

    /// `key=value` lines in key order.
    pub fn canonical(&self, command: &str) -> String {
        let mut s = format!("command={command}\n");
        for (k, v) in &self.resolved {
            s.push_str(k);
            s.push('=');
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    pub fn digest(&self, command: &str) -> String {
        hex::encode(Sha256::digest(self.canonical(command).as_bytes()))
    }
}
