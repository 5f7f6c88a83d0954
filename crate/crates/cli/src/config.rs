//! Flat `key = value` experiment files.
//!
//! One entry per line, `#` starts a comment, blank lines are ignored. Lists
//! are comma separated. Every value read through a getter, including
//! defaults, is recorded so the resolved configuration can be logged.

use crate::error::CliError;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    base_dir: PathBuf,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", n + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", n + 1)));
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key `{key}`",
                    n + 1
                )));
            }
        }
        Ok(Config {
            entries,
            base_dir: base_dir.to_path_buf(),
            resolved: RefCell::default(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn str_opt(&self, key: &str) -> Option<String> {
        let v = self.entries.get(key).cloned();
        if let Some(v) = &v {
            self.record(key, v.clone());
        }
        v
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        let v = self
            .entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        v.parse::<T>()
            .map_err(|e| CliError::Config(format!("`{key}`: cannot parse `{v}`: {e}")))
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.str_opt(key)
            .map(|v| Self::parse_value(key, &v))
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.entries.get(key) {
            Some(v) => {
                let x = Self::parse_value(key, v)?;
                self.record(key, v.clone());
                Ok(x)
            }
            None => {
                self.record(key, default.to_string());
                Ok(default)
            }
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.entries.get(key) {
            Some(v) => {
                let x = Self::parse_value(key, v)?;
                self.record(key, v.clone());
                Ok(x)
            }
            None => {
                self.record(key, default.to_string());
                Ok(default)
            }
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        let v = self.str_or(key, if default { "true" } else { "false" });
        match v.as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(CliError::Config(format!(
                "`{key}`: expected true or false, got `{v}`"
            ))),
        }
    }

    pub fn list_opt(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.str_opt(key)
            .map(|v| {
                v.split(',')
                    .map(|t| Self::parse_value::<f64>(key, t.trim()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.list_opt(key)? {
            Some(v) => Ok(v),
            None => {
                let text: Vec<String> = default.iter().map(|x| x.to_string()).collect();
                self.record(key, text.join(", "));
                Ok(default.to_vec())
            }
        }
    }

    pub fn triple_opt(&self, key: &str) -> Result<Option<[f64; 3]>, CliError> {
        match self.list_opt(key)? {
            None => Ok(None),
            Some(v) if v.len() == 3 => Ok(Some([v[0], v[1], v[2]])),
            Some(v) => Err(CliError::Config(format!(
                "`{key}` needs 3 values, got {}",
                v.len()
            ))),
        }
    }

    pub fn pair_opt(&self, key: &str) -> Result<Option<[f64; 2]>, CliError> {
        match self.list_opt(key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some([v[0], v[1]])),
            Some(v) => Err(CliError::Config(format!(
                "`{key}` needs 2 values, got {}",
                v.len()
            ))),
        }
    }

    /// A path value, relative to the directory of the config file; it must exist.
    pub fn existing_path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        match self.str_opt(key) {
            None => Ok(None),
            Some(v) => {
                let p = self.base_dir.join(&v);
                if !p.exists() {
                    return Err(CliError::Config(format!(
                        "`{key}`: file {} does not exist",
                        p.display()
                    )));
                }
                Ok(Some(p))
            }
        }
    }

    /// Every key read so far with the value used, one `key = value` per line.
    pub fn resolved(&self) -> String {
        self.resolved
            .borrow()
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Keys present in the file that no command read.
    pub fn unused(&self) -> Vec<String> {
        let r = self.resolved.borrow();
        self.entries
            .keys()
            .filter(|k| !r.contains_key(*k))
            .cloned()
            .collect()
    }
}
