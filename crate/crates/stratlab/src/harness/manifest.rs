//! Run manifests: config echo, produced files with checksums, and the
//! scenario's pass/fail verdict.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::spectral::snapshot::crc32;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub crc32: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub config_echo: String,
    pub wall_clock_secs: f64,
    pub files: Vec<FileEntry>,
    pub pass: bool,
    /// Scenario-specific summary values (certified c, fit exponents, ...).
    pub details: serde_json::Value,
}

impl RunManifest {
    pub fn new(scenario: &str, seed: u64, config_echo: String) -> Self {
        RunManifest {
            scenario: scenario.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_echo,
            wall_clock_secs: 0.0,
            files: Vec::new(),
            pass: false,
            details: serde_json::Value::Null,
        }
    }

    /// Registers a produced file, hashing its current contents.
    pub fn add_file(&mut self, out_dir: &Path, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        let rel = path.strip_prefix(out_dir).unwrap_or(path);
        self.files.push(FileEntry {
            path: rel.to_string_lossy().into_owned(),
            bytes: bytes.len() as u64,
            crc32: crc32(&bytes),
        });
        Ok(())
    }

    /// Writes the manifest itself (not listed among its own files).
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json)?;
        Ok(path)
    }
}
