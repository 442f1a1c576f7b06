//! Plain `key = value` configuration files.
//!
//! Precedence is flags over file over defaults; the resolved values are what
//! the manifest records.

use std::collections::BTreeMap;
use std::path::Path;

use crate::Failure;

#[derive(Default, Debug, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Run(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Usage(format!(
                    "{}:{}: expected `key = value`, got {raw:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                Failure::Usage(format!("config key {key} = {raw:?} is invalid: {e}"))
            }),
        }
    }

    pub fn get_flag(&self, key: &str) -> Result<Option<bool>, Failure> {
        self.get::<bool>(key)
    }
}
