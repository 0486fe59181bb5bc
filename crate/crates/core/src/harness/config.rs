//! Flat key-value run configuration.
//!
//! Configs are text files of `key = value` lines (# comments allowed) plus
//! command-line `key=value` overrides. A reader resolves typed values with
//! defaults, collecting every problem instead of stopping at the first, and
//! records the effective value of each key it touched; the sorted effective
//! pairs are what gets hashed, so the run directory names the parameters the
//! run actually used.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io_util::fmt_f64;

#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn empty() -> Self {
        ConfigMap::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut problems = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((key, value)) => {
                    let key = key.trim().to_string();
                    let value = value.trim().to_string();
                    if key.is_empty() {
                        problems.push(format!("line {}: empty key", lineno + 1));
                        continue;
                    }
                    match entries.entry(key) {
                        Entry::Vacant(slot) => {
                            slot.insert(value);
                        }
                        Entry::Occupied(slot) => {
                            problems.push(format!(
                                "line {}: key '{}' set twice",
                                lineno + 1,
                                slot.key()
                            ));
                        }
                    }
                }
                None => problems.push(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )),
            }
        }
        if problems.is_empty() {
            Ok(ConfigMap { entries })
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        ConfigMap::parse(&std::fs::read_to_string(path)?)
    }

    /// Apply `key=value` override strings; later entries win.
    pub fn apply_overrides(&mut self, sets: &[String]) -> Result<()> {
        let mut problems = Vec::new();
        for s in sets {
            match s.split_once('=') {
                Some((key, value)) if !key.trim().is_empty() => {
                    self.entries
                        .insert(key.trim().to_string(), value.trim().to_string());
                }
                _ => problems.push(format!("override '{s}' is not 'key=value'")),
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|v| v.as_str())
    }
}

/// Typed access with defaults and full error accumulation. Every read is
/// recorded; `finish` rejects unread keys (typos) and returns the effective
/// configuration that the hash is computed from.
pub struct ConfigReader<'a> {
    map: &'a ConfigMap,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
    problems: Vec<String>,
}

impl<'a> ConfigReader<'a> {
    pub fn new(map: &'a ConfigMap) -> Self {
        ConfigReader {
            map,
            used: BTreeSet::new(),
            resolved: BTreeMap::new(),
            problems: Vec::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a str> {
        self.used.insert(key.to_string());
        self.map.get(key)
    }

    pub fn f64(&mut self, key: &str, default: f64) -> f64 {
        let value = match self.raw(key) {
            Some(text) => match text.parse::<f64>() {
                Ok(v) => v,
                Err(_) => {
                    self.problems
                        .push(format!("key '{key}': '{text}' is not a number"));
                    default
                }
            },
            None => default,
        };
        self.resolved.insert(key.to_string(), fmt_f64(value));
        value
    }

    pub fn usize(&mut self, key: &str, default: usize) -> usize {
        let value = match self.raw(key) {
            Some(text) => match text.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    self.problems.push(format!(
                        "key '{key}': '{text}' is not a nonnegative integer"
                    ));
                    default
                }
            },
            None => default,
        };
        self.resolved.insert(key.to_string(), value.to_string());
        value
    }

    pub fn bool(&mut self, key: &str, default: bool) -> bool {
        let value = match self.raw(key) {
            Some("true") => true,
            Some("false") => false,
            Some(text) => {
                self.problems
                    .push(format!("key '{key}': '{text}' is not true/false"));
                default
            }
            None => default,
        };
        self.resolved.insert(key.to_string(), value.to_string());
        value
    }

    /// Mandatory seed for stochastic runs; no default on purpose.
    pub fn require_seed(&mut self, key: &str) -> u64 {
        let value = match self.raw(key) {
            Some(text) => match text.parse::<u64>() {
                Ok(v) => v,
                Err(_) => {
                    self.problems
                        .push(format!("key '{key}': '{text}' is not an unsigned integer"));
                    0
                }
            },
            None => {
                self.problems
                    .push(format!("key '{key}' is required for stochastic runs"));
                0
            }
        };
        self.resolved.insert(key.to_string(), value.to_string());
        value
    }

    pub fn optional_path(&mut self, key: &str) -> Option<String> {
        let value = self.raw(key).map(|s| s.to_string());
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.clone());
        }
        value
    }

    /// Record a validation failure against a key that parsed fine.
    pub fn reject(&mut self, message: impl Into<String>) {
        self.problems.push(message.into());
    }

    /// Reject a key that is meaningless in the current mode (for example a
    /// seed next to an explicit input file). Marks it read either way so the
    /// complaint names the conflict, not an "unknown key".
    pub fn forbid(&mut self, key: &str, why: &str) {
        if self.raw(key).is_some() {
            self.problems.push(format!("key '{key}' {why}"));
        }
    }

    pub fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.problems.push(message.into());
        }
    }

    pub fn finish(mut self) -> Result<EffectiveConfig> {
        for key in self.map.entries.keys() {
            if !self.used.contains(key) {
                self.problems.push(format!("unknown key '{key}'"));
            }
        }
        if self.problems.is_empty() {
            Ok(EffectiveConfig {
                pairs: self.resolved,
            })
        } else {
            Err(Error::Config(self.problems))
        }
    }
}

/// The parameters a run actually used, in canonical text form.
#[derive(Debug, Clone)]
pub struct EffectiveConfig {
    pairs: BTreeMap<String, String>,
}

impl EffectiveConfig {
    pub fn canonical(&self, subcommand: &str) -> String {
        let mut text = format!("subcommand = {subcommand}\n");
        for (k, v) in &self.pairs {
            text.push_str(k);
            text.push_str(" = ");
            text.push_str(v);
            text.push('\n');
        }
        text
    }

    /// First 16 hex characters of the SHA-256 of the canonical form.
    pub fn hash(&self, subcommand: &str) -> String {
        let digest = Sha256::digest(self.canonical(subcommand).as_bytes());
        let mut out = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn pairs(&self) -> &BTreeMap<String, String> {
        &self.pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_blanks_and_overrides() {
        let mut map =
            ConfigMap::parse("# benchmark\n\nn_particles = 500\n dt=1e-3 # fine\nlabel = run a\n")
                .unwrap();
        map.apply_overrides(&["dt=2e-3".to_string()]).unwrap();
        let mut reader = ConfigReader::new(&map);
        assert_eq!(reader.usize("n_particles", 1), 500);
        assert_eq!(reader.f64("dt", 0.0), 2e-3);
        assert_eq!(reader.optional_path("label").as_deref(), Some("run a"));
        reader.finish().unwrap();
    }

    #[test]
    fn every_problem_is_collected() {
        let map = ConfigMap::parse("a = x\nb = -1\nstray = 1\n").unwrap();
        let mut reader = ConfigReader::new(&map);
        let a = reader.f64("a", 1.0);
        assert_eq!(a, 1.0);
        let b = reader.usize("b", 2);
        assert_eq!(b, 2);
        reader.check(false, "c out of range");
        match reader.finish() {
            Err(Error::Config(problems)) => {
                assert_eq!(problems.len(), 4, "{problems:?}");
                assert!(problems.iter().any(|p| p.contains("unknown key 'stray'")));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_keys_and_bad_lines_are_rejected() {
        assert!(ConfigMap::parse("a = 1\na = 2\n").is_err());
        assert!(ConfigMap::parse("just words\n").is_err());
        let mut map = ConfigMap::empty();
        assert!(map.apply_overrides(&["oops".to_string()]).is_err());
    }

    #[test]
    fn hash_depends_on_effective_values_only() {
        let map = ConfigMap::parse("dt = 0.001\n").unwrap();
        let mut reader = ConfigReader::new(&map);
        reader.f64("dt", 0.0);
        reader.f64("t_final", 1.0);
        let a = reader.finish().unwrap();

        // Same values spelled differently resolve to the same hash.
        let map = ConfigMap::parse("dt = 1e-3\nt_final = 1.0\n").unwrap();
        let mut reader = ConfigReader::new(&map);
        reader.f64("dt", 0.0);
        reader.f64("t_final", 2.0);
        let b = reader.finish().unwrap();
        assert_eq!(a.hash("x"), b.hash("x"));
        assert_ne!(a.hash("x"), a.hash("y"));
        assert_eq!(a.hash("x").len(), 16);
    }

    #[test]
    fn missing_seed_is_reported_by_name() {
        let map = ConfigMap::empty();
        let mut reader = ConfigReader::new(&map);
        reader.require_seed("seed");
        match reader.finish() {
            Err(Error::Config(problems)) => {
                assert!(problems[0].contains("'seed'"), "{problems:?}")
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
