//! Flat key=value run configuration. Files hold one `key = value` pair per
//! line; `#` starts a comment. Later [`ConfigMap::set`] calls override file
//! entries, which is how command-line flags win over the config file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed reading config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("config line {line}: expected key=value, got {text:?}")]
    BadLine { line: usize, text: String },
    #[error("config key {key}: cannot parse {value:?} as {ty}")]
    BadValue { key: String, value: String, ty: &'static str },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn new() -> Self {
        ConfigMap::default()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine { line: no + 1, text: raw.to_string() });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::BadLine { line: no + 1, text: raw.to_string() });
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Inserts or replaces one entry; used for command-line overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Parsed lookup with a default for missing keys. Present keys that fail
    /// to parse are an error, never silently defaulted.
    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(value) => value.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: value.clone(),
                ty: std::any::type_name::<T>(),
            }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
