//! Run configuration: a small sectioned key/value text format plus dotted
//! command-line overrides.
//!
//! ```text
//! # comment
//! [params]
//! nu = 0.01
//! inviscid = false
//! recipe = "gaussian"
//! k_list = [0.25, 0.5, 1.0]
//! ```
//!
//! Values are floats, booleans, quoted strings, or float lists. Overrides
//! use `--set section.key=value` with the same value grammar.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Float(f64),
    Bool(bool),
    Str(String),
    List(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::List(l) => {
                write!(f, "[")?;
                for (i, v) in l.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

fn parse_value(text: &str, line: usize) -> Result<Value> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Config { line, msg: "empty value".to_string() });
    }
    if t == "true" {
        return Ok(Value::Bool(true));
    }
    if t == "false" {
        return Ok(Value::Bool(false));
    }
    if let Some(inner) = t.strip_prefix('"') {
        let Some(stripped) = inner.strip_suffix('"') else {
            return Err(Error::Config { line, msg: "unterminated string".to_string() });
        };
        if stripped.contains('"') {
            return Err(Error::Config { line, msg: "embedded quote in string".to_string() });
        }
        return Ok(Value::Str(stripped.to_string()));
    }
    if let Some(inner) = t.strip_prefix('[') {
        let Some(stripped) = inner.strip_suffix(']') else {
            return Err(Error::Config { line, msg: "unterminated list".to_string() });
        };
        let mut list = Vec::new();
        let body = stripped.trim();
        if !body.is_empty() {
            for item in body.split(',') {
                let v: f64 = item.trim().parse().map_err(|_| Error::Config {
                    line,
                    msg: format!("bad list element {:?}", item.trim()),
                })?;
                if !v.is_finite() {
                    return Err(Error::Config { line, msg: "non-finite list element".to_string() });
                }
                list.push(v);
            }
        }
        return Ok(Value::List(list));
    }
    let v: f64 = t
        .parse()
        .map_err(|_| Error::Config { line, msg: format!("cannot parse value {t:?}") })?;
    if !v.is_finite() {
        return Err(Error::Config { line, msg: "non-finite value".to_string() });
    }
    Ok(Value::Float(v))
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parsed configuration document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub sections: BTreeMap<String, BTreeMap<String, Value>>,
}

impl ConfigDoc {
    /// Parses the sectioned text format. Line numbers are 1-based in errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDoc::default();
        let mut current: Option<String> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let Some(name) = inner.strip_suffix(']') else {
                    return Err(Error::Config {
                        line: line_no,
                        msg: "unterminated section header".to_string(),
                    });
                };
                let name = name.trim();
                if !valid_name(name) {
                    return Err(Error::Config {
                        line: line_no,
                        msg: format!("bad section name {name:?}"),
                    });
                }
                doc.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("expected `key = value`, got {line:?}"),
                });
            };
            let key = key.trim();
            if !valid_name(key) {
                return Err(Error::Config { line: line_no, msg: format!("bad key {key:?}") });
            }
            let Some(section) = current.clone() else {
                return Err(Error::Config {
                    line: line_no,
                    msg: "key outside any [section]".to_string(),
                });
            };
            let value = parse_value(value, line_no)?;
            doc.sections.get_mut(&section).unwrap().insert(key.to_string(), value);
        }
        Ok(doc)
    }

    /// Applies one `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let Some((path, value)) = spec.split_once('=') else {
            return Err(Error::ConfigKey(format!("override {spec:?} is missing `=`")));
        };
        let Some((section, key)) = path.trim().split_once('.') else {
            return Err(Error::ConfigKey(format!(
                "override key {path:?} must be section.key"
            )));
        };
        if !valid_name(section.trim()) || !valid_name(key.trim()) {
            return Err(Error::ConfigKey(format!("bad override key {path:?}")));
        }
        let value = parse_value(value, 0)?;
        self.sections
            .entry(section.trim().to_string())
            .or_default()
            .insert(key.trim().to_string(), value);
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.sections.get(section)?.get(key)
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<f64> {
        match self.get(section, key) {
            Some(Value::Float(v)) => Ok(*v),
            Some(other) => Err(Error::ConfigKey(format!(
                "{section}.{key} should be a number, got {other}"
            ))),
            None => Err(Error::ConfigKey(format!("missing key {section}.{key}"))),
        }
    }

    pub fn get_f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            None => Ok(default),
            Some(_) => self.get_f64(section, key),
        }
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<usize> {
        let v = self.get_f64(section, key)?;
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(Error::ConfigKey(format!(
                "{section}.{key} should be a nonnegative integer, got {v}"
            )));
        }
        Ok(v as usize)
    }

    pub fn get_usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        match self.get(section, key) {
            None => Ok(default),
            Some(_) => self.get_usize(section, key),
        }
    }

    pub fn get_u64_or(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        match self.get(section, key) {
            None => Ok(default),
            Some(_) => {
                let v = self.get_f64(section, key)?;
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::ConfigKey(format!(
                        "{section}.{key} should be a nonnegative integer, got {v}"
                    )));
                }
                Ok(v as u64)
            }
        }
    }

    pub fn get_bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(Error::ConfigKey(format!(
                "{section}.{key} should be a boolean, got {other}"
            ))),
        }
    }

    pub fn get_str(&self, section: &str, key: &str) -> Result<&str> {
        match self.get(section, key) {
            Some(Value::Str(s)) => Ok(s),
            Some(other) => Err(Error::ConfigKey(format!(
                "{section}.{key} should be a string, got {other}"
            ))),
            None => Err(Error::ConfigKey(format!("missing key {section}.{key}"))),
        }
    }

    pub fn get_str_or<'a>(&'a self, section: &str, key: &str, default: &'a str) -> Result<&'a str> {
        match self.get(section, key) {
            None => Ok(default),
            Some(_) => self.get_str(section, key),
        }
    }

    pub fn get_list(&self, section: &str, key: &str) -> Result<&[f64]> {
        match self.get(section, key) {
            Some(Value::List(l)) => Ok(l),
            Some(other) => Err(Error::ConfigKey(format!(
                "{section}.{key} should be a list, got {other}"
            ))),
            None => Err(Error::ConfigKey(format!("missing key {section}.{key}"))),
        }
    }

    /// Canonical text form (sections and keys sorted).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (section, kv) in &self.sections {
            out.push_str(&format!("[{section}]\n"));
            for (k, v) in kv {
                out.push_str(&format!("{k} = {v}\n"));
            }
            out.push('\n');
        }
        out
    }
}

/// Scenario selector, one per CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    CertifyLinear,
    SweepModes,
    Simulate,
    FitRates,
    CheckConstants,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::CertifyLinear => "certify-linear",
            Scenario::SweepModes => "sweep-modes",
            Scenario::Simulate => "simulate",
            Scenario::FitRates => "fit-rates",
            Scenario::CheckConstants => "check-constants",
        }
    }
}

/// A scenario plus its parsed configuration and output location.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub doc: ConfigDoc,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
}

impl RunConfig {
    /// Loads a config file and applies overrides in order.
    pub fn load(
        scenario: Scenario,
        path: &Path,
        overrides: &[String],
        out_dir_flag: Option<&Path>,
    ) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(scenario, &text, overrides, out_dir_flag)
    }

    pub fn from_text(
        scenario: Scenario,
        text: &str,
        overrides: &[String],
        out_dir_flag: Option<&Path>,
    ) -> Result<Self> {
        let mut doc = ConfigDoc::parse(text)?;
        for o in overrides {
            doc.apply_override(o)?;
        }
        let out_dir = match out_dir_flag {
            Some(p) => p.to_path_buf(),
            None => PathBuf::from(doc.get_str_or("output", "dir", "out")?),
        };
        let seed = doc.get_u64_or("output", "seed", 0)?;
        // worker count: config key beats the environment variable
        let env_workers = std::env::var("STRATLAB_WORKERS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(0);
        let workers = doc.get_usize_or("output", "workers", env_workers)?;
        Ok(RunConfig { scenario, doc, out_dir, seed, workers })
    }
}
