//! Flat dotted-key parameter files.
//!
//! Files are TOML restricted to scalars and arrays; tables are flattened so
//! that `[photonic]\nbitrate_gbps = 30` and `photonic.bitrate_gbps = 30` name
//! the same key. Command-line overrides use the same `key=value` syntax.

use std::collections::BTreeMap;
use std::path::Path;

use toml::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, Value>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        let mut cfg = FlatConfig::default();
        flatten("", table, &mut cfg.entries);
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override. The value is read as a TOML value
    /// when it parses as one and as a bare string otherwise.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, raw) = spec.split_once('=').ok_or_else(|| {
            Error::ConfigParse(format!("override {spec:?} is not of the form key=value"))
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::ConfigParse(format!("override {spec:?} has an empty key")));
        }
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.set(key, value);
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    /// Keys under `prefix.` with the prefix stripped.
    pub fn scoped(&self, prefix: &str) -> FlatConfig {
        let dotted = format!("{prefix}.");
        FlatConfig {
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(&dotted).map(|s| (s.to_string(), v.clone())))
                .collect(),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.typed(key, "a number", as_f64)
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.typed(key, "a non-negative integer", |v| {
            v.as_integer().and_then(|i| u64::try_from(i).ok())
        })
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.typed(key, "a non-negative integer", |v| {
            v.as_integer().and_then(|i| usize::try_from(i).ok())
        })
    }

    pub fn u32(&self, key: &str) -> Result<Option<u32>> {
        self.typed(key, "a non-negative integer", |v| {
            v.as_integer().and_then(|i| u32::try_from(i).ok())
        })
    }

    /// Strings, plus integers rendered as text (so `adc_bits = 8` and
    /// `adc_bits = "ideal"` both read as strings).
    pub fn string(&self, key: &str) -> Result<Option<String>> {
        self.typed(key, "a string", |v| match v {
            Value::String(s) => Some(s.clone()),
            Value::Integer(i) => Some(i.to_string()),
            _ => None,
        })
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.list(key, "a list of numbers", as_f64)
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.list(key, "a list of non-negative integers", |v| {
            v.as_integer().and_then(|i| usize::try_from(i).ok())
        })
    }

    pub fn string_list(&self, key: &str) -> Result<Option<Vec<String>>> {
        self.list(key, "a list of strings", |v| match v {
            Value::String(s) => Some(s.clone()),
            Value::Integer(i) => Some(i.to_string()),
            _ => None,
        })
    }

    fn typed<T>(&self, key: &str, what: &str, f: impl Fn(&Value) -> Option<T>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => f(v).map(Some).ok_or_else(|| Error::ConfigKey {
                key: key.to_string(),
                reason: format!("expected {what}, got {v}"),
            }),
        }
    }

    fn list<T>(&self, key: &str, what: &str, f: impl Fn(&Value) -> Option<T>) -> Result<Option<Vec<T>>> {
        let err = |v: &Value| Error::ConfigKey {
            key: key.to_string(),
            reason: format!("expected {what}, got {v}"),
        };
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|item| f(item).ok_or_else(|| err(item)))
                .collect::<Result<Vec<T>>>()
                .map(Some),
            // A scalar stands for a one-element list.
            Some(v) => f(v).map(|x| Some(vec![x])).ok_or_else(|| err(v)),
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn flatten(prefix: &str, table: toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other);
            }
        }
    }
}
