//! The self-describing header every result file starts with.
//!
//! The header is a single `# `-prefixed line holding a JSON object: command
//! name, resolved configuration, artifact version, seed, timestamps, and
//! digests of any input files. Bodies after the header are reproducible
//! byte-for-byte from the recorded command line; only the timestamps vary.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEADER_PREFIX: &str = "# ";

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    #[serde(default)]
    pub command_line: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Fully resolved configuration of the run.
    pub config: serde_json::Value,
    pub started_at: String,
    #[serde(default)]
    pub finished_at: Option<String>,
    #[serde(default)]
    pub input_digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, started_at: String) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: Vec::new(),
            seed: None,
            config,
            started_at,
            finished_at: None,
            input_digests: BTreeMap::new(),
        }
    }

    pub fn header_line(&self) -> Result<String> {
        Ok(format!("{HEADER_PREFIX}{}", serde_json::to_string(self)?))
    }

    pub fn parse_header_line(line: &str) -> Result<Self> {
        let body = line.strip_prefix(HEADER_PREFIX).ok_or_else(|| {
            Error::CorruptCheckpoint(format!(
                "first line does not start with {HEADER_PREFIX:?}"
            ))
        })?;
        Ok(serde_json::from_str(body)?)
    }

    pub fn config_as<T: DeserializeOwned>(&self) -> Result<T> {
        Ok(serde_json::from_value(self.config.clone())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_roundtrip() {
        let mut manifest = RunManifest::new(
            "sweep",
            serde_json::json!({"n": 3, "r": 2}),
            "2020-01-01T00:00:00Z".into(),
        );
        manifest.seed = Some(7);
        manifest
            .input_digests
            .insert("config.txt".into(), "deadbeef".into());
        let line = manifest.header_line().unwrap();
        assert!(line.starts_with("# {"));
        let parsed = RunManifest::parse_header_line(&line).unwrap();
        assert_eq!(parsed.command, "sweep");
        assert_eq!(parsed.seed, Some(7));
        assert_eq!(parsed.config["n"], 3);
        assert!(RunManifest::parse_header_line("{}").is_err());
    }
}
