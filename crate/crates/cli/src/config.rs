//! Flat `key = value` run files merged underneath command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

const KEYS: [&str; 10] = [
    "s",
    "eps",
    "sigma",
    "modes",
    "dt",
    "t-samples",
    "seed",
    "out",
    "force-large",
    "criterion",
];

/// Parsed run file. `#` starts a comment; `eps` may list several values
/// separated by commas or repeat on several lines.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        FileConfig::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<FileConfig> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`", n + 1);
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key `{key}`", n + 1);
            }
            let slot = values.entry(key).or_default();
            slot.extend(
                value
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .filter(|v| !v.is_empty()),
            );
        }
        Ok(FileConfig { values })
    }

    fn last(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .and_then(|v| v.last())
            .map(String::as_str)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.last(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| anyhow::anyhow!("bad value `{v}` for `{key}`")),
        }
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.values
            .get(key)
            .map(|vals| {
                vals.iter()
                    .map(|v| {
                        v.parse()
                            .map_err(|_| anyhow::anyhow!("bad value `{v}` for `{key}`"))
                    })
                    .collect()
            })
            .unwrap_or_else(|| Ok(Vec::new()))
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.last(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => bail!("bad value `{v}` for `{key}`"),
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.last(key).map(PathBuf::from)
    }
}
