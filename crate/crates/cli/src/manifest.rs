//! Run manifests and per-component seeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Components that draw random numbers; each gets its own seed.
pub const SEED_COMPONENTS: [&str; 3] = ["coefficients", "ensemble", "property_suite"];

/// First eight bytes of sha256(seed ‖ name), little-endian.
pub fn component_seed(seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputChecksum {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    /// sha256 of the effective configuration, serialized as TOML.
    pub config_hash: String,
    pub seed: u64,
    pub seeds: BTreeMap<String, u64>,
    pub oracle: bool,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputChecksum>,
}

impl RunManifest {
    pub fn new(command: &str, config_toml: &str, seed: u64, oracle: bool) -> Self {
        RunManifest {
            command: command.to_string(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: sha256_hex(config_toml.as_bytes()),
            seed,
            seeds: SEED_COMPONENTS
                .iter()
                .map(|c| (c.to_string(), component_seed(seed, c)))
                .collect(),
            oracle,
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Checksums the files in the order given.
    pub fn record_outputs(&mut self, dir: &Path, files: &[PathBuf]) -> Result<()> {
        for file in files {
            let bytes = std::fs::read(file).map_err(|e| CliError::io(file, e))?;
            let name = file.strip_prefix(dir).unwrap_or(file).display().to_string();
            self.outputs.push(OutputChecksum {
                file: name,
                sha256: sha256_hex(&bytes),
            });
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }
}
