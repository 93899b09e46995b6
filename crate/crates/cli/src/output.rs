//! Writing artifacts and the run manifest.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const MANIFEST_SCHEMA: &str = "lgt-manifest/1";

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub versions: Versions,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub outputs: Vec<OutputEntry>,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    #[serde(rename = "lgt-cli")]
    pub cli: &'static str,
    #[serde(rename = "lgt-core")]
    pub core: &'static str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Fails if any target exists and overwriting was not requested.
pub fn check_targets(dir: &Path, names: &[String], overwrite: bool) -> Result<()> {
    if overwrite {
        return Ok(());
    }
    let existing: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).filter(|p| p.exists()).collect();
    if !existing.is_empty() {
        bail!(
            "refusing to overwrite {}; pass --force",
            existing.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
        );
    }
    Ok(())
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<OutputEntry>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.bytes).with_context(|| format!("writing {}", path.display()))?;
            Ok(OutputEntry { file: a.name.clone(), bytes: a.bytes.len(), sha256: sha256_hex(&a.bytes) })
        })
        .collect()
}

/// `<command>.manifest.json`, so several commands can share a directory.
pub fn manifest_name(command: &str) -> String {
    format!("{command}.manifest.json")
}

pub fn write_manifest(dir: &Path, m: &Manifest) -> Result<PathBuf> {
    let mut text = serde_json::to_vec_pretty(m)?;
    text.push(b'\n');
    let path = dir.join(manifest_name(m.command));
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
