//! Run manifests: enough to reproduce a run and fingerprint its outputs.

use anyhow::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<OutputEntry>,
}

pub struct ManifestBuilder {
    command: String,
    config: BTreeMap<String, String>,
    seed: u64,
    started: u64,
    out_dir: PathBuf,
    outputs: Vec<PathBuf>,
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl ManifestBuilder {
    pub fn new(command: &str, config: BTreeMap<String, String>, seed: u64, out_dir: &Path) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            config,
            seed,
            started: now_unix(),
            out_dir: out_dir.to_path_buf(),
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: impl AsRef<Path>) {
        self.outputs.push(path.as_ref().to_path_buf());
    }

    pub fn finish(self) -> Result<()> {
        let mut entries = Vec::new();
        for path in &self.outputs {
            let bytes = std::fs::read(path)?;
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            let digest = hasher.finalize();
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            let rel = path
                .strip_prefix(&self.out_dir)
                .unwrap_or(path)
                .to_string_lossy()
                .to_string();
            entries.push(OutputEntry {
                file: rel,
                sha256: hex,
                bytes: bytes.len() as u64,
            });
        }
        let manifest = Manifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: self.started,
            finished_unix: now_unix(),
            outputs: entries,
        };
        let path = self.out_dir.join("manifest.json");
        std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}
