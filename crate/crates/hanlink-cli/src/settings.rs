//! Flat key=value config files and the flag > config > environment > default
//! resolution order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};

pub const DICT_ENV: &str = "HANLINK_DICT";

#[derive(Debug, Default)]
pub struct Config(BTreeMap<String, String>);

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let src = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut map = BTreeMap::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value, got `{line}`", path.display(), i + 1);
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config(map))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// String-valued setting: flag, else config.
    pub fn str_opt(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.raw(key).map(str::to_string))
    }

    /// Path-valued setting: flag, else config, else an environment variable.
    pub fn path_opt(&self, flag: Option<PathBuf>, key: &str, env: Option<&str>) -> Option<PathBuf> {
        flag.or_else(|| self.raw(key).map(PathBuf::from))
            .or_else(|| env.and_then(|v| std::env::var_os(v)).map(PathBuf::from))
    }

    /// Parsed numeric setting with a default.
    pub fn parse_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        match flag {
            Some(v) => Ok(v),
            None => match self.raw(key) {
                Some(s) => s.parse().with_context(|| format!("config key {key}: bad value `{s}`")),
                None => Ok(default),
            },
        }
    }

    /// Presence flag: the command line can only turn it on; the config can
    /// set either way.
    pub fn bool_or(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some(s) => match s.to_lowercase().as_str() {
                "1" | "true" | "yes" | "on" => Ok(true),
                "0" | "false" | "no" | "off" => Ok(false),
                other => bail!("config key {key}: bad boolean `{other}`"),
            },
        }
    }

    /// Repeatable flag: config fallback is a comma-separated list.
    pub fn list_or(&self, flags: Vec<String>, key: &str) -> Vec<String> {
        if !flags.is_empty() {
            return flags;
        }
        self.raw(key)
            .map(|s| s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect())
            .unwrap_or_default()
    }
}
