//! Run manifests written next to every output file.

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use oqi_core::PhysicalConfig;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const TOOL_NAME: &str = "oqi";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// Physical parameters in SI units; Δx is the command's own or 0 for sweeps.
    pub config: PhysicalConfig,
    /// Resolved command parameters, keyed by flag name.
    pub spec: Map<String, Value>,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: PhysicalConfig, spec: Map<String, Value>, seed: Option<u64>) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config,
            spec,
            seed,
            timestamp,
        }
    }

    pub fn read(path: &FsPath) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: malformed manifest: {e}", path.display())))
    }

    pub fn write(&self, path: &FsPath) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
    }

    /// Checks that this manifest was produced by `command`.
    pub fn expect_command(&self, command: &str) -> Result<(), CliError> {
        if self.command != command {
            return Err(CliError::config(format!(
                "manifest was written by `{}`, not `{command}`",
                self.command
            )));
        }
        if self.tool_version != TOOL_VERSION {
            eprintln!(
                "warning: manifest from {} {}, running {TOOL_VERSION}; output may differ",
                self.tool, self.tool_version
            );
        }
        Ok(())
    }
}

/// `<out>.manifest.json`
pub fn manifest_path(out: &FsPath) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
