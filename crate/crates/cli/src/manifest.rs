//! Run manifests written next to every output file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Resolved configuration; anything that can change results.
    pub config: serde_json::Value,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, outputs: Vec<PathBuf>) -> Self {
        Self {
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs,
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write(&self, output: &Path) -> Result<(), CliError> {
        let path = Self::path_for(output);
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        fs::write(&path, text + "\n")
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    /// Refuse to append to `output` if it was produced by a different
    /// configuration.
    pub fn check_resume(&self, output: &Path) -> Result<(), CliError> {
        if !output.exists() {
            return Ok(());
        }
        let path = Self::path_for(output);
        let text = fs::read_to_string(&path).map_err(|_| {
            CliError::Data(format!(
                "{} exists without a manifest; refusing to resume",
                output.display()
            ))
        })?;
        let old: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if old.command != self.command || old.config != self.config {
            return Err(CliError::Data(format!(
                "{} was written by a different configuration (see {}); use another output path",
                output.display(),
                path.display()
            )));
        }
        Ok(())
    }
}
