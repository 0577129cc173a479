//! Driver behind the `fluxring` binary.
//!
//! Every run resolves its configuration completely before doing any work and
//! embeds the resolved form in what it writes: as `# `-prefixed TOML lines
//! at the top of CSV files, and under a `config` key in JSON reports. Either
//! file can be passed back through `--config` to repeat the run.

pub mod commands;
pub mod config;
mod error;

use std::fs;
use std::io::Write;
use std::path::Path;

pub use config::{Command, ConfigFile, Outputs, Overrides, RunConfig};
pub use error::{CliError, Result};

/// Loads the optional config file, applies the overrides and resolves.
pub fn resolve(
    command: Command,
    config_path: Option<&Path>,
    overrides: &Overrides,
) -> Result<(RunConfig, Outputs)> {
    let mut file = match config_path {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    file.apply(overrides);
    RunConfig::resolve(command, &file)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// Runs a resolved configuration and writes its outputs.
pub fn execute(config: &RunConfig, outputs: &Outputs) -> Result<()> {
    let out = outputs.out.as_deref();
    match config.command {
        Command::Simulate => {
            let snapshots = commands::simulate(config)?;
            emit(out, &commands::simulate_csv(config, &snapshots))
        }
        Command::Estimate => emit(out, &commands::to_json(&commands::estimate(config)?)),
        Command::Mc => {
            let result = commands::mc(config)?;
            if let Some(path) = outputs.trial_csv.as_deref() {
                emit(Some(path), &commands::trials_csv(config, &result.records))?;
            }
            emit(out, &commands::to_json(&result.report))
        }
        Command::Feasibility => emit(out, &commands::to_json(&commands::feasibility(config)?)),
        Command::Oracle => emit(out, &commands::to_json(&commands::oracle(config)?)),
    }
}

pub fn run(command: Command, config_path: Option<&Path>, overrides: &Overrides) -> Result<()> {
    let (config, outputs) = resolve(command, config_path, overrides)?;
    match outputs.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::config(format!("run.threads: {e}")))?
            .install(|| execute(&config, &outputs)),
        None => execute(&config, &outputs),
    }
}
