use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Record written next to every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the resolved configuration; the thread count is excluded.
    pub config_digest: String,
    pub seed: Option<u64>,
    pub output_paths: Vec<PathBuf>,
    pub duration_s: f64,
    pub code_version: String,
    pub notes: Vec<(String, String)>,
    pub config: BTreeMap<String, String>,
}

/// `<out>.manifest`, keeping the output's own extension.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".manifest");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("command={}", self.command),
            format!("config_digest={}", self.config_digest),
        ];
        if let Some(seed) = self.seed {
            lines.push(format!("seed={seed}"));
        }
        let paths: Vec<String> = self
            .output_paths
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        lines.push(format!("output_paths={}", paths.join(",")));
        lines.push(format!("duration_s={:.3}", self.duration_s));
        lines.push(format!("code_version={}", self.code_version));
        lines.extend(self.notes.iter().map(|(k, v)| format!("{k}={v}")));
        lines.extend(self.config.iter().map(|(k, v)| format!("config.{k}={v}")));
        let mut text = lines.join("\n");
        text.push('\n');
        text
    }
}
