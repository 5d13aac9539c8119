use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::errors::CliError;

/// Run manifest written alongside every command's outputs: command name,
/// fully resolved configuration, seed, tool version, paths, wall time.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub tool_version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

pub struct ManifestBuilder {
    command: String,
    start: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            start: Instant::now(),
        }
    }

    pub fn write(
        self,
        path: &Path,
        config: serde_json::Value,
        seed: u64,
        inputs: Vec<String>,
        outputs: Vec<String>,
    ) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: self.command,
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs,
            outputs,
            wall_time_s: self.start.elapsed().as_secs_f64(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}
