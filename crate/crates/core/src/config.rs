//! `key = value` configuration text.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Keys are
//! kept in insertion order so emitted text is stable.

use std::fmt::Display;
use std::str::FromStr;

use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value for {key}: {msg}")]
    Value { key: String, msg: String },
    #[error("missing config key {0:?}")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvConfig {
    entries: IndexMap<String, String>,
}

impl KvConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = KvConfig::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected `key = value`, got {raw:?}"),
            })?;
            let k = k.trim();
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    msg: format!("bad key {k:?}"),
                });
            }
            cfg.set(k, v.trim());
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.entries.shift_remove(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(&mut self, other: &KvConfig) {
        for (k, v) in other.iter() {
            self.set(k, v);
        }
    }

    pub fn parsed<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| ConfigError::Value {
                    key: key.to_string(),
                    msg: e.to_string(),
                })
            })
            .transpose()
    }

    pub fn require<T>(&self, key: &str) -> Result<T, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.parsed(key)?.ok_or_else(|| ConfigError::Missing(key.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_emit() {
        let cfg = KvConfig::parse("# header\nlr = 1.0\n\nseed=7   # trailing\n").unwrap();
        assert_eq!(cfg.get("lr"), Some("1.0"));
        assert_eq!(cfg.require::<u64>("seed").unwrap(), 7);
        assert_eq!(cfg.to_text(), "lr = 1.0\nseed = 7\n");
        assert_eq!(KvConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            KvConfig::parse("a = 1\njunk\n"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        let cfg = KvConfig::parse("n = x").unwrap();
        assert!(matches!(cfg.parsed::<u32>("n"), Err(ConfigError::Value { .. })));
        assert!(matches!(cfg.require::<u32>("m"), Err(ConfigError::Missing(_))));
    }

    #[test]
    fn merge_overrides() {
        let mut a = KvConfig::parse("x = 1\ny = 2").unwrap();
        a.merge(&KvConfig::parse("y = 3\nz = 4").unwrap());
        assert_eq!(a.to_text(), "x = 1\ny = 3\nz = 4\n");
    }
}
