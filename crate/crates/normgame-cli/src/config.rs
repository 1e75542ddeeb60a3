//! JSON config file support: keys match flag names exactly; explicit flags
//! override file values.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Lookup layer over the optional `--config` JSON object.
pub struct Config {
    map: serde_json::Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let map = match path {
            None => serde_json::Map::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                let value: Value = serde_json::from_str(&text)
                    .map_err(|e| CliError::Args(format!("--config: invalid json: {e}")))?;
                match value {
                    Value::Object(map) => map,
                    _ => {
                        return Err(CliError::Args(
                            "--config: top level must be a json object".into(),
                        ))
                    }
                }
            }
        };
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    /// Required f64: flag wins, then config, else an error naming the flag.
    pub fn require_f64(&self, key: &str, flag: Option<f64>) -> CliResult<f64> {
        self.f64(key, flag)?
            .ok_or_else(|| CliError::Args(format!("missing required flag --{key}")))
    }

    pub fn f64(&self, key: &str, flag: Option<f64>) -> CliResult<Option<f64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(v) => Ok(Some(value_to_f64(key, v)?)),
        }
    }

    pub fn f64_or(&self, key: &str, flag: Option<f64>, default: f64) -> CliResult<f64> {
        Ok(self.f64(key, flag)?.unwrap_or(default))
    }

    pub fn require_usize(&self, key: &str, flag: Option<usize>) -> CliResult<usize> {
        self.usize(key, flag)?
            .ok_or_else(|| CliError::Args(format!("missing required flag --{key}")))
    }

    pub fn usize(&self, key: &str, flag: Option<usize>) -> CliResult<Option<usize>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let f = value_to_f64(key, v)?;
                if f < 0.0 || f.fract() != 0.0 {
                    return Err(CliError::Args(format!("--{key} must be a non-negative integer")));
                }
                Ok(Some(f as usize))
            }
        }
    }

    pub fn usize_or(&self, key: &str, flag: Option<usize>, default: usize) -> CliResult<usize> {
        Ok(self.usize(key, flag)?.unwrap_or(default))
    }

    pub fn string(&self, key: &str, flag: Option<String>) -> CliResult<Option<String>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(Value::Bool(b)) => Ok(Some(b.to_string())),
            Some(other) => Err(CliError::Args(format!("--{key}: unsupported json value {other}"))),
        }
    }

    pub fn require_string(&self, key: &str, flag: Option<String>) -> CliResult<String> {
        self.string(key, flag)?
            .ok_or_else(|| CliError::Args(format!("missing required flag --{key}")))
    }

    pub fn path(&self, key: &str, flag: Option<PathBuf>) -> CliResult<Option<PathBuf>> {
        Ok(self.string(key, flag.map(|p| p.display().to_string()))?.map(PathBuf::from))
    }

    pub fn bool_or(&self, key: &str, flag: bool, default: bool) -> CliResult<bool> {
        if flag {
            return Ok(true);
        }
        match self.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(CliError::Args(format!("--{key}: expected a boolean, got {other}"))),
        }
    }

    /// Comma-separated list (or JSON array) of f64 values; flag wins.
    pub fn f64_list(&self, key: &str, flag: Option<&str>) -> CliResult<Option<Vec<f64>>> {
        if let Some(text) = flag {
            return parse_f64_list(key, text).map(Some);
        }
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    out.push(value_to_f64(key, item)?);
                }
                Ok(Some(out))
            }
            Some(Value::String(s)) => parse_f64_list(key, s).map(Some),
            Some(Value::Number(n)) => Ok(Some(vec![value_to_f64(key, &Value::Number(n.clone()))?])),
            Some(other) => Err(CliError::Args(format!("--{key}: unsupported json value {other}"))),
        }
    }

    pub fn f64_list_or(&self, key: &str, flag: Option<&str>, default: &[f64]) -> CliResult<Vec<f64>> {
        Ok(self.f64_list(key, flag)?.unwrap_or_else(|| default.to_vec()))
    }
}

fn value_to_f64(key: &str, value: &Value) -> CliResult<f64> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CliError::Args(format!("--{key}: {n} is not representable"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Args(format!("--{key}: cannot parse {s:?} as a number"))),
        other => Err(CliError::Args(format!("--{key}: expected a number, got {other}"))),
    }
}

pub fn parse_f64_list(key: &str, text: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(
            part.parse()
                .map_err(|_| CliError::Args(format!("--{key}: cannot parse {part:?} as a number")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Args(format!("--{key}: empty list")));
    }
    Ok(out)
}
