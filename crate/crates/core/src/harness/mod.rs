//! Config-driven batch runs behind the command line.
//!
//! A run is a pure function of its flat `key = value` configuration: the
//! reader resolves every key (reporting all problems at once), the resolved
//! pairs are hashed into the output directory name, the study writes its
//! artifacts and named assertions under `<out>/<subcommand>/<hash>/`, and
//! `manifest.json` records what ran and whether it passed. Only the
//! wall-clock duration in the manifest varies between identical runs.

mod config;
mod manifest;
mod runs;

pub use config::{ConfigMap, ConfigReader, EffectiveConfig};
pub use manifest::{AssertionRecord, RunContext, RunManifest};
pub use runs::{exit_code, run, Subcommand};
