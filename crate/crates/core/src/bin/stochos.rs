use std::path::PathBuf;

use clap::Parser;

use stochos::harness::{exit_code, run, ConfigMap, RunManifest, Subcommand};
use stochos::Result;

#[derive(Parser)]
#[command(
    name = "stochos",
    version,
    about = "Stochastic-process routes to quantum dynamics",
    long_about = "Runs one of the built-in studies (or all of them) against its \
                  analytic and cross-method checks. Each run writes CSV/JSON \
                  artifacts plus a manifest of named pass/fail assertions under \
                  <out>/<subcommand>/<config-hash>/. Exit codes: 0 all assertions \
                  passed, 1 an assertion failed, 2 bad configuration, 3 the \
                  computation failed."
)]
struct Cli {
    /// Study to run: nelson, telegraph, checkerboard, rs-photon, rs-field,
    /// network, foam, or all (fixed defaults only).
    #[arg(value_parser = parse_subcommand)]
    subcommand: Subcommand,

    /// Flat `key = value` config file; '#' starts a comment.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override or add one key (repeatable), e.g. --set n_particles=50000.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output root; runs land in <out>/<subcommand>/<config-hash>/.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_subcommand(name: &str) -> std::result::Result<Subcommand, String> {
    Subcommand::parse(name).ok_or_else(|| {
        format!(
            "unknown subcommand '{name}'; expected one of nelson, telegraph, \
             checkerboard, rs-photon, rs-field, network, foam, all"
        )
    })
}

fn execute(cli: &Cli) -> Result<RunManifest> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigMap::from_file(path)?,
        None => ConfigMap::empty(),
    };
    cfg.apply_overrides(&cli.set)?;
    run(cli.subcommand, &cfg, &cli.out)
}

fn main() {
    let cli = Cli::parse();
    let outcome = execute(&cli);
    match &outcome {
        Ok(manifest) => {
            for a in &manifest.assertions {
                let tag = if a.passed { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {}", a.name, a.detail);
            }
            let manifest_path = cli
                .out
                .join(&manifest.subcommand)
                .join(&manifest.config_hash)
                .join("manifest.json");
            println!(
                "{} {} in {:.3}s -> {}",
                manifest.subcommand,
                if manifest.passed { "passed" } else { "FAILED" },
                manifest.duration_seconds,
                manifest_path.display()
            );
        }
        Err(err) => eprintln!("error: {err}"),
    }
    std::process::exit(exit_code(&outcome));
}
