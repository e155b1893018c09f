//! Output manifest: every artifact written by a pipeline run, with a
//! SHA-256 content hash, the echoed configuration and tool versions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use scf_ganlab_core::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestFile>,
    pub config_echo: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
    /// Wall-clock stamp; excluded from determinism comparisons.
    pub generated_at_unix: u64,
}

pub struct ManifestBuilder {
    root: PathBuf,
    files: Vec<ManifestFile>,
    config_echo: BTreeMap<String, String>,
}

impl ManifestBuilder {
    pub fn new(root: &Path, config_echo: BTreeMap<String, String>) -> Self {
        ManifestBuilder {
            root: root.to_path_buf(),
            files: Vec::new(),
            config_echo,
        }
    }

    /// Write `bytes` under the output root and record its hash.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, bytes)?;
        self.record(rel, bytes);
        Ok(path)
    }

    /// Record a file written by another component (e.g. a model bundle).
    pub fn record_existing(&mut self, rel: &str) -> Result<()> {
        let bytes = std::fs::read(self.root.join(rel))?;
        self.record(rel, &bytes);
        Ok(())
    }

    fn record(&mut self, rel: &str, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        self.files.push(ManifestFile {
            path: rel.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn finish(mut self) -> Result<Manifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let mut versions = BTreeMap::new();
        versions.insert(
            "scf-ganlab-cli".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        let manifest = Manifest {
            files: self.files,
            config_echo: self.config_echo,
            versions,
            generated_at_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(self.root.join("manifest.json"), json)?;
        Ok(manifest)
    }
}
