//! Flat `key = value` text documents.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Lists
//! are comma separated and matrix rows are separated by `;`. Used for
//! experiment configs, target specifications and estimate records.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KvError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDocument {
    entries: BTreeMap<String, String>,
}

impl KvDocument {
    pub fn parse(text: &str) -> Result<Self, KvError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(KvError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(KvError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            }
            if entries
                .insert(key.to_string(), v.trim().to_string())
                .is_some()
            {
                return Err(KvError::Duplicate {
                    line: i + 1,
                    key: key.to_string(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require_str(&self, key: &str) -> Result<&str, KvError> {
        self.get_str(key)
            .ok_or_else(|| KvError::Missing(key.to_string()))
    }

    pub fn get<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<T>, KvError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| KvError::BadValue {
                key: key.to_string(),
                value: v.clone(),
                expected,
            }),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, KvError> {
        Ok(self.get(key, "a real number")?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, KvError> {
        self.get(key, "a real number")?
            .ok_or_else(|| KvError::Missing(key.to_string()))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, KvError> {
        Ok(self.get(key, "a non-negative integer")?.unwrap_or(default))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, KvError> {
        Ok(self.get(key, "a non-negative integer")?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, KvError> {
        Ok(self.get(key, "true or false")?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<Vec<T>>, KvError> {
        let Some(v) = self.entries.get(key) else {
            return Ok(None);
        };
        v.split([',', ';'])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| KvError::BadValue {
                    key: key.to_string(),
                    value: v.clone(),
                    expected,
                })
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, KvError> {
        self.list(key, "a list of real numbers")
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>, KvError> {
        self.list(key, "a list of non-negative integers")
    }

    /// Renders in key order with floats already formatted by the caller.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Formats a float with 17 significant digits; parses back bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_f64_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(",")
}
