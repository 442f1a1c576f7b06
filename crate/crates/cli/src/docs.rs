//! Result-document plumbing: manifest headers, digests, and file writing.

use std::collections::BTreeMap;
use std::path::Path;

use permoracle::manifest::RunManifest;
use sha2::{Digest, Sha256};

use crate::Failure;

pub fn sha256_hex(path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Run(format!("cannot digest {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Builds the manifest every result file starts with.
pub fn manifest_for(
    command: &str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: &[&Path],
) -> Result<RunManifest, Failure> {
    let mut manifest = RunManifest::new(command, config, chrono::Utc::now().to_rfc3339());
    manifest.command_line = std::env::args().collect();
    manifest.seed = seed;
    let mut digests = BTreeMap::new();
    for path in inputs {
        digests.insert(path.display().to_string(), sha256_hex(path)?);
    }
    manifest.input_digests = digests;
    Ok(manifest)
}

/// Writes a result document: one manifest header line, then the JSON body.
pub fn write_document<T: serde::Serialize>(
    path: &Path,
    manifest: &RunManifest,
    body: &T,
) -> Result<(), Failure> {
    let header = manifest
        .header_line()
        .map_err(|e| Failure::Run(e.to_string()))?;
    let body = serde_json::to_string_pretty(body).map_err(|e| Failure::Run(e.to_string()))?;
    std::fs::write(path, format!("{header}\n{body}\n"))
        .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Probabilities are printed with 12 significant digits everywhere.
pub fn fmt_prob(p: f64) -> String {
    format!("{:.12}", p)
}
