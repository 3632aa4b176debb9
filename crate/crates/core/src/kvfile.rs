//! Plain-text `key = value` configuration files.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parsed key/value pairs; keys are lower-cased, `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct KvFile {
    entries: BTreeMap<String, String>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key `{key}`",
                    i + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.require(key)?)
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        v.parse()
            .map_err(|_| Error::Config(format!("`{key}`: `{v}` is not a non-negative integer")))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(Error::Config(format!("`{key}`: `{v}` is not a boolean"))),
            },
        }
    }

    /// Comma-separated integer list; `None` when the key is absent.
    pub fn int_list(&self, key: &str) -> Result<Option<Vec<i64>>> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<i64>()
                    .map_err(|_| Error::Config(format!("`{key}`: `{s}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("`{key}`: `{v}` is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let kv =
            KvFile::parse("# header\nA = 1.5\nlist = 1, 2,3 # trailing\n\nflag=yes\n").unwrap();
        assert_eq!(kv.require_f64("a").unwrap(), 1.5);
        assert_eq!(kv.int_list("list").unwrap(), Some(vec![1, 2, 3]));
        assert!(kv.bool_or("flag", false).unwrap());
        assert!(kv.require("missing").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(
            KvFile::parse("no equals sign"),
            Err(Error::Config(_))
        ));
        assert!(matches!(KvFile::parse("a=1\na=2"), Err(Error::Config(_))));
    }
}
