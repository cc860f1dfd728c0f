//! Run manifests: what ran, with which configuration, producing which
//! outputs. Re-running with a manifest's config must reproduce the listed
//! output checksums bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    /// how the work was partitioned, for the determinism contract
    pub partition: String,
    pub tool_version: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub outputs: Vec<OutputRecord>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

pub struct ManifestBuilder {
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: u64) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                command: command.to_string(),
                config: BTreeMap::new(),
                seed,
                partition: format!("static blocks of {} integers, merged in order", crate::survey::BLOCK),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                started: Utc::now(),
                finished: Utc::now(),
                outputs: Vec::new(),
            },
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.manifest.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn partition(&mut self, desc: &str) -> &mut Self {
        self.manifest.partition = desc.to_string();
        self
    }

    /// Checksums an already-written output file into the manifest.
    pub fn record(&mut self, path: &Path) -> Result<&mut Self> {
        self.manifest.outputs.push(OutputRecord {
            path: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            sha256: sha256_file(path)?,
        });
        Ok(self)
    }

    /// Writes `manifest.json` into `dir` and returns its path.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.manifest.finished = Utc::now();
        let path = dir.join("manifest.json");
        super::table::write_json_file(&self.manifest, &path)?;
        Ok(path)
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<RunManifest> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Output checksums keyed by file name; the reproducibility comparand.
    pub fn checksums(&self) -> BTreeMap<&str, &str> {
        self.outputs
            .iter()
            .map(|o| (o.path.as_str(), o.sha256.as_str()))
            .collect()
    }
}
