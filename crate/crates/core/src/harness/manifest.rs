//! Run manifests: what a run computed, what it wrote, and whether the
//! pinned assertions held. One manifest per run directory.
//!
//! Everything in the manifest except `duration_seconds` is a pure function
//! of the configuration, so reruns reproduce data artifacts byte for byte
//! and the manifest up to that one field.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_hash: String,
    pub code_version: String,
    pub duration_seconds: f64,
    /// File names relative to the run directory, in write order.
    pub outputs: Vec<String>,
    pub assertions: Vec<AssertionRecord>,
    pub passed: bool,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Accumulates outputs and assertions while a run executes, then seals them
/// into a manifest written at `<dir>/manifest.json`.
pub struct RunContext {
    subcommand: String,
    config_hash: String,
    dir: PathBuf,
    started: Instant,
    outputs: Vec<String>,
    assertions: Vec<AssertionRecord>,
}

impl RunContext {
    pub fn create(out_root: &Path, subcommand: &str, config_hash: &str) -> Result<Self> {
        let dir = out_root.join(subcommand).join(config_hash);
        std::fs::create_dir_all(&dir)?;
        Ok(RunContext {
            subcommand: subcommand.to_string(),
            config_hash: config_hash.to_string(),
            dir,
            started: Instant::now(),
            outputs: Vec::new(),
            assertions: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Register an artifact and get its full path.
    pub fn artifact(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    pub fn assert_that(&mut self, name: &str, passed: bool, detail: String) {
        self.assertions.push(AssertionRecord {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    /// value <= bound, recorded with both numbers.
    pub fn assert_le(&mut self, name: &str, value: f64, bound: f64) {
        self.assert_that(
            name,
            value.is_finite() && value <= bound,
            format!("{value:.6e} <= {bound:.6e}"),
        );
    }

    /// |value - target| <= tol, recorded with all three numbers.
    pub fn assert_close(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.assert_that(
            name,
            value.is_finite() && (value - target).abs() <= tol,
            format!("{value:.6e} within {tol:.3e} of {target:.6e}"),
        );
    }

    pub fn finish(self) -> Result<RunManifest> {
        let passed = self.assertions.iter().all(|a| a.passed);
        let manifest = RunManifest {
            subcommand: self.subcommand,
            config_hash: self.config_hash,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            assertions: self.assertions,
            passed,
        };
        std::fs::write(
            self.dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_records_assertions_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut ctx = RunContext::create(dir.path(), "demo", "abc123").unwrap();
        let file = ctx.artifact("data.csv");
        std::fs::write(&file, "x\n1\n").unwrap();
        ctx.assert_le("small_enough", 0.5, 1.0);
        ctx.assert_close("on_target", 2.0, 2.0, 1e-12);
        ctx.assert_le("too_big", 2.0, 1.0);
        let manifest = ctx.finish().unwrap();
        assert!(!manifest.passed);
        assert_eq!(manifest.outputs, vec!["data.csv"]);
        assert_eq!(manifest.assertions.len(), 3);
        assert!(manifest.assertions[0].passed);
        assert!(!manifest.assertions[2].passed);

        let back = RunManifest::read(&dir.path().join("demo/abc123/manifest.json")).unwrap();
        assert_eq!(back.subcommand, "demo");
        assert_eq!(back.config_hash, "abc123");
        assert!(!back.passed);
    }

    #[test]
    fn non_finite_values_fail_assertions() {
        let dir = tempfile::tempdir().unwrap();
        let mut ctx = RunContext::create(dir.path(), "demo", "x").unwrap();
        ctx.assert_le("nan_check", f64::NAN, 1.0);
        let manifest = ctx.finish().unwrap();
        assert!(!manifest.passed);
    }
}
