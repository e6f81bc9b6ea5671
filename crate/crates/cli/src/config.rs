//! Settings from an optional TOML file and `POLYZETA_*` environment variables.
//!
//! Precedence, weakest first: defaults, file, environment, command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use polyzeta::numeric::NumericConfig;

pub const ENV_PREFIX: &str = "POLYZETA_";

/// Merged configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    /// Default bound for `relations`.
    pub max_weight: usize,
    pub numeric: NumericConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { max_weight: 6, numeric: NumericConfig::default() }
    }
}

/// A configuration problem; always a usage error.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    /// File key or environment variable at fault.
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { key: key.to_string(), message: message.into() }
}

const KEYS: [&str; 4] = ["max_weight", "terms", "tol", "precision_bits"];

fn set(s: &mut Settings, key: &str, raw: Raw, label: &str) -> Result<(), ConfigError> {
    let int = |r: &Raw| -> Result<u64, ConfigError> {
        match r {
            Raw::Int(i) if *i >= 0 => Ok(*i as u64),
            Raw::Str(t) => t.trim().parse().map_err(|_| bad(label, format!("expected a non-negative integer, got \"{t}\""))),
            _ => Err(bad(label, "expected a non-negative integer")),
        }
    };
    match key {
        "max_weight" => s.max_weight = int(&raw)? as usize,
        "terms" => s.numeric.terms = int(&raw)? as usize,
        "precision_bits" => s.numeric.precision_bits = int(&raw)? as u32,
        "tol" => {
            s.numeric.tol = match &raw {
                Raw::Float(x) => *x,
                Raw::Int(i) => *i as f64,
                Raw::Str(t) => t.trim().parse().map_err(|_| bad(label, format!("expected a number, got \"{t}\"")))?,
            }
        }
        _ => return Err(bad(label, format!("unknown key; expected one of {}", KEYS.join(", ")))),
    }
    Ok(())
}

enum Raw {
    Int(i64),
    Float(f64),
    Str(String),
}

/// Overlay a TOML document on `s`.
pub fn apply_toml(s: &mut Settings, text: &str) -> Result<(), ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let msg = e.message().to_string();
        bad("<file>", msg)
    })?;
    for (k, v) in table {
        let raw = match v {
            toml::Value::Integer(i) => Raw::Int(i),
            toml::Value::Float(x) => Raw::Float(x),
            toml::Value::String(t) => Raw::Str(t),
            other => return Err(bad(&k, format!("unsupported value {other}"))),
        };
        set(s, &k, raw, &k)?;
    }
    Ok(())
}

/// Overlay `POLYZETA_MAX_WEIGHT`, `POLYZETA_TERMS`, `POLYZETA_TOL`, `POLYZETA_PRECISION_BITS`.
pub fn apply_env(s: &mut Settings, env: &BTreeMap<String, String>) -> Result<(), ConfigError> {
    for key in KEYS {
        let var = format!("{ENV_PREFIX}{}", key.to_uppercase());
        if let Some(v) = env.get(&var) {
            set(s, key, Raw::Str(v.clone()), &var)?;
        }
    }
    Ok(())
}

fn check(s: &Settings) -> Result<(), ConfigError> {
    if !(2..=16).contains(&s.max_weight) {
        return Err(bad("max_weight", format!("must be in 2..=16, got {}", s.max_weight)));
    }
    s.numeric.validate().map_err(|e| bad("numeric", e.to_string()))
}

/// Defaults, then the file (`path`, or `POLYZETA_CONFIG`), then the environment.
pub fn load_config(path: Option<&Path>, env: &BTreeMap<String, String>) -> Result<Settings, ConfigError> {
    let mut s = Settings::default();
    let from_env = env.get(&format!("{ENV_PREFIX}CONFIG")).map(Path::new);
    if let Some(p) = path.or(from_env) {
        let text = std::fs::read_to_string(p).map_err(|e| bad("<file>", format!("{}: {e}", p.display())))?;
        apply_toml(&mut s, &text)?;
    }
    apply_env(&mut s, env)?;
    check(&s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let mut s = Settings::default();
        let e = apply_toml(&mut s, "tolerance = 1e-4").unwrap_err();
        assert_eq!(e.key, "tolerance");
        let e = apply_toml(&mut s, "terms = \"many\"").unwrap_err();
        assert_eq!(e.key, "terms");
    }
}
