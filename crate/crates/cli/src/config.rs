//! Key-value config files with flag > config > default precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};

/// A `key = value` text file; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// Optional config path helper: absent path gives an empty config.
    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map(ConfigFile::load).transpose().map(|c| c.unwrap_or_default())
    }

    /// Resolves a value with flag > config > default precedence.
    pub fn resolve<T: FromStr + Copy>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow!("config key {key} = {raw:?}: {e}")),
            None => Ok(default),
        }
    }

    /// Boolean resolution accepting `true/false/1/0/on/off`.
    pub fn resolve_bool(&self, flag: Option<bool>, key: &str, default: bool) -> Result<bool> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key).map(|s| s.to_ascii_lowercase()) {
            None => Ok(default),
            Some(s) if ["true", "1", "on", "yes"].contains(&s.as_str()) => Ok(true),
            Some(s) if ["false", "0", "off", "no"].contains(&s.as_str()) => Ok(false),
            Some(s) => Err(anyhow!("config key {key} = {s:?} is not a boolean")),
        }
    }
}
