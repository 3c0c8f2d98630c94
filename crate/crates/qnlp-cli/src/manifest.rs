//! Run provenance: every command writes a manifest capturing exactly what
//! ran, on which inputs (content-hashed), with which seed, and what it
//! produced. The manifest is written once at startup and finalized in place
//! when the run ends; both writes go through a temp file and an atomic
//! rename.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub input_hashes: BTreeMap<String, String>,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub outputs: Vec<String>,
    pub status: String,
    #[serde(skip)]
    path: PathBuf,
}

pub fn timestamp() -> String {
    chrono::Local::now().format("%Y-%m-%dT%H:%M:%S%.3f%z").to_string()
}

/// Directory name component: compact local time.
pub fn run_dir_stamp() -> String {
    chrono::Local::now().format("%Y%m%d-%H%M%S").to_string()
}

fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("reading input {} for hashing", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("sha256:{:x}", hasher.finalize()))
}

impl RunManifest {
    /// Creates the run directory and writes the initial manifest.
    pub fn begin(
        run_dir: &Path,
        command: &str,
        config: serde_json::Value,
        seed: u64,
        inputs: &[&Path],
    ) -> Result<Self> {
        std::fs::create_dir_all(run_dir)
            .with_context(|| format!("creating run directory {}", run_dir.display()))?;
        let mut input_hashes = BTreeMap::new();
        for input in inputs {
            input_hashes.insert(input.display().to_string(), hash_file(input)?);
        }
        let manifest = RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            config,
            seed,
            input_hashes,
            started_at: timestamp(),
            finished_at: None,
            outputs: Vec::new(),
            status: "running".to_string(),
            path: run_dir.join("manifest.json"),
        };
        manifest.write()?;
        Ok(manifest)
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn finish(&mut self, status: &str) -> Result<()> {
        self.finished_at = Some(timestamp());
        self.status = status.to_string();
        self.write()
    }

    fn write(&self) -> Result<()> {
        let tmp = self.path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(self)?)?;
        std::fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}
