//! Optional JSON configuration: a flat object whose keys mirror flag names
//! (`{"fps": 30, "sample-rate": 48000}`). Explicit flags win over the file,
//! the file wins over built-in defaults.

use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Default)]
pub struct Config {
    map: Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        match value {
            Value::Object(map) => Ok(Self { map }),
            _ => Err(CliError::Usage(format!(
                "config {} must be a JSON object",
                path.display()
            ))),
        }
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.map.get(key).and_then(Value::as_f64)
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.map.get(key).and_then(Value::as_u64)
    }

    pub fn u32(&self, key: &str) -> Option<u32> {
        self.u64(key).and_then(|v| u32::try_from(v).ok())
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.map.get(key).and_then(Value::as_str).map(str::to_owned)
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        self.map.get(key).and_then(Value::as_bool)
    }
}

/// Flag value, falling back to the config file, then an error naming the flag.
pub fn require<T>(flag: Option<T>, from_config: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(from_config)
        .ok_or_else(|| CliError::Usage(format!("--{name} is required (flag or config)")))
}
