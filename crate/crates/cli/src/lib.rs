//! Command-line front end for the real-clock simulations.
//!
//! A run reads one JSON config, applies `--set key.path=value` overrides,
//! validates everything before computing, and writes a deterministic CSV or
//! JSON file that embeds the resolved config.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod seed;

use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::Value;

pub use commands::{run, Command, RunOptions};
pub use error::CliError;
pub use output::{Format, Report, Table};

/// Environment variable selecting the sweep worker-pool size.
pub const WORKERS_ENV: &str = "REALCLOCK_QM_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "realclock-qm", version, about = "Quantum evolution measured by real clocks")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON config file (not needed for `schema`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config value by dotted path, e.g. `evolve.step=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Root seed; overrides the `seed` key of the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn workers_from_env() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got `{s}`"
            ))),
        },
    }
}

pub fn load_config(path: &Path) -> Result<Value, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))
}

/// Executes a parsed command line and writes its output file.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if cli.command == Command::Schema {
        let mut text = serde_json::to_string_pretty(&commands::schema()).expect("schema serializes");
        text.push('\n');
        return std::fs::write(&cli.out, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", cli.out.display())));
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut raw = load_config(path)?;
    if !raw.is_object() {
        return Err(CliError::Config("config root must be an object".into()));
    }
    for assignment in &cli.overrides {
        config::apply_override(&mut raw, assignment)?;
    }
    if let Some(seed) = cli.seed {
        config::set_path(&mut raw, "seed", Value::from(seed))?;
    }
    let opts = RunOptions {
        workers: workers_from_env()?,
    };
    let report = run(cli.command, &raw, opts)?;
    report.write(&cli.out, cli.format)
}
