//! Run configuration: the declarative file, flag overrides and the fully
//! resolved form that is embedded in every output.

use std::fmt;
use std::path::{Path, PathBuf};

use fluxring::units::{alpha_to_flux, flux_to_alpha, RingConfig, ELECTRON_MASS};
use fluxring::{make_gaussian_packet, PacketSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_DELTA_N: f64 = 10.0;
pub const DEFAULT_RADIUS: f64 = 1e-6;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_DTAU: f64 = 1e-5;
pub const SIMULATE_TAUS: [f64; 5] = [0.0, 0.25, 1.0 / 3.0, 0.5, 1.0];
pub const ORACLE_TAUS: [f64; 1] = [0.01];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Estimate,
    Mc,
    Feasibility,
    Oracle,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Simulate => "simulate",
            Command::Estimate => "estimate",
            Command::Mc => "mc",
            Command::Feasibility => "feasibility",
            Command::Oracle => "oracle",
        })
    }
}

/// Configuration as written by a user; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    #[serde(default)]
    pub packet: PacketSection,
    #[serde(default)]
    pub ring: RingSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSection {
    pub delta_n: Option<f64>,
    pub n0: Option<i64>,
    pub phi0: Option<f64>,
    pub cutoff: Option<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    pub mass: Option<f64>,
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    pub flux_wb: Option<f64>,
    pub relativistic: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub grid_size: Option<usize>,
    pub taus: Option<Vec<f64>>,
    pub dtau: Option<f64>,
    pub shots: Option<usize>,
    pub out: Option<PathBuf>,
    pub trial_csv: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub delta_n: Option<f64>,
    pub n0: Option<i64>,
    pub phi0: Option<f64>,
    pub cutoff: Option<i64>,
    pub mass: Option<f64>,
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    pub flux_wb: Option<f64>,
    pub relativistic: Option<bool>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub grid_size: Option<usize>,
    pub taus: Option<Vec<f64>>,
    pub dtau: Option<f64>,
    pub shots: Option<usize>,
    pub out: Option<PathBuf>,
    pub trial_csv: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn set<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
    if value.is_some() {
        slot.clone_from(value);
    }
}

impl ConfigFile {
    /// Reads a TOML file, the `# `-prefixed header of a CSV output, or a JSON
    /// report with a `config` member.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let value: serde_json::Value =
                serde_json::from_str(trimmed).map_err(|e| CliError::config(e.to_string()))?;
            let config = value.get("config").cloned().unwrap_or(value);
            return serde_json::from_value(config).map_err(|e| CliError::config(e.to_string()));
        }
        if trimmed.starts_with('#') {
            let header: String = trimmed
                .lines()
                .map_while(|line| line.strip_prefix('#'))
                .map(|line| format!("{}\n", line.strip_prefix(' ').unwrap_or(line)))
                .collect();
            return toml::from_str(&header).map_err(|e| CliError::config(e.to_string()));
        }
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        set(&mut self.packet.delta_n, &o.delta_n);
        set(&mut self.packet.n0, &o.n0);
        set(&mut self.packet.phi0, &o.phi0);
        set(&mut self.packet.cutoff, &o.cutoff);
        set(&mut self.ring.mass, &o.mass);
        set(&mut self.ring.radius, &o.radius);
        if o.alpha.is_some() || o.flux_wb.is_some() {
            self.ring.alpha = o.alpha;
            self.ring.flux_wb = o.flux_wb;
        }
        set(&mut self.ring.relativistic, &o.relativistic);
        set(&mut self.run.seed, &o.seed);
        set(&mut self.run.trials, &o.trials);
        set(&mut self.run.grid_size, &o.grid_size);
        set(&mut self.run.taus, &o.taus);
        set(&mut self.run.dtau, &o.dtau);
        set(&mut self.run.shots, &o.shots);
        set(&mut self.run.out, &o.out);
        set(&mut self.run.trial_csv, &o.trial_csv);
        set(&mut self.run.threads, &o.threads);
    }
}

/// Fully resolved configuration.
///
/// Output paths and the thread count are left out: they do not change the
/// data, and leaving them out keeps replayed outputs byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub packet: Packet,
    pub ring: Ring,
    pub run: Run,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub delta_n: f64,
    pub n0: i64,
    pub phi0: f64,
    pub cutoff: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub mass: f64,
    pub radius: f64,
    pub alpha: f64,
    pub flux_wb: f64,
    pub relativistic: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Run {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dtau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
}

/// Where a run writes; `None` means standard output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub out: Option<PathBuf>,
    pub trial_csv: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn resolve_alpha(ring: &RingSection) -> Result<f64> {
    match (ring.alpha, ring.flux_wb) {
        (Some(alpha), Some(flux)) => {
            let from_flux = flux_to_alpha(flux);
            if (from_flux - alpha).abs() > 1e-12 * alpha.abs().max(1.0) {
                return Err(CliError::config(format!(
                    "ring.alpha = {alpha} disagrees with ring.flux_wb = {flux} (alpha {from_flux})"
                )));
            }
            Ok(alpha)
        }
        (Some(alpha), None) => Ok(alpha),
        (None, Some(flux)) => Ok(flux_to_alpha(flux)),
        (None, None) => Ok(0.0),
    }
}

impl RunConfig {
    pub fn resolve(command: Command, file: &ConfigFile) -> Result<(RunConfig, Outputs)> {
        if let Some(written) = file.command {
            if written != command {
                return Err(CliError::config(format!(
                    "config is for `{written}`, not `{command}`"
                )));
            }
        }
        let p = &file.packet;
        let delta_n = p.delta_n.unwrap_or(DEFAULT_DELTA_N);
        let mut spec = PacketSpec::new(delta_n, p.n0.unwrap_or(0), p.phi0.unwrap_or(0.0));
        if let Some(cutoff) = p.cutoff {
            spec = spec.with_cutoff(cutoff);
        }
        let psi0 = make_gaussian_packet(&spec)?;

        let alpha = resolve_alpha(&file.ring)?;
        let ring = RingConfig::new(
            file.ring.mass.unwrap_or(ELECTRON_MASS),
            file.ring.radius.unwrap_or(DEFAULT_RADIUS),
            alpha,
        )?
        .with_relativistic(file.ring.relativistic.unwrap_or(false));

        let r = &file.run;
        let mut run = Run::default();
        match command {
            Command::Simulate => {
                run.grid_size = r.grid_size;
                run.taus = Some(r.taus.clone().unwrap_or_else(|| SIMULATE_TAUS.to_vec()));
            }
            Command::Estimate => {
                run.seed = Some(r.seed.unwrap_or(0));
                run.grid_size = r.grid_size;
                run.shots = Some(r.shots.unwrap_or(1));
            }
            Command::Mc => {
                run.seed = Some(r.seed.unwrap_or(0));
                run.trials = Some(r.trials.unwrap_or(DEFAULT_TRIALS));
                run.grid_size = r.grid_size;
                run.shots = Some(r.shots.unwrap_or(1));
            }
            Command::Feasibility => {}
            Command::Oracle => {
                run.grid_size = r.grid_size;
                run.taus = Some(r.taus.clone().unwrap_or_else(|| ORACLE_TAUS.to_vec()));
                run.dtau = Some(r.dtau.unwrap_or(DEFAULT_DTAU));
                if ring.rel_enabled {
                    return Err(CliError::config(
                        "ring.relativistic is not supported by the grid oracle",
                    ));
                }
            }
        }
        if command != Command::Feasibility {
            run.grid_size = Some(run.grid_size.unwrap_or_else(|| psi0.default_grid_size()));
        }
        if let Some(taus) = &run.taus {
            if taus.is_empty() {
                return Err(CliError::config("run.taus must not be empty"));
            }
            if let Some(bad) = taus.iter().find(|t| !t.is_finite()) {
                return Err(CliError::config(format!("run.taus: non-finite time {bad}")));
            }
        }
        if r.threads == Some(0) {
            return Err(CliError::config("run.threads must be at least 1"));
        }

        let config = RunConfig {
            command,
            packet: Packet {
                delta_n: spec.delta_n,
                n0: spec.n0,
                phi0: spec.phi0,
                cutoff: spec.cutoff,
            },
            ring: Ring {
                mass: ring.mass,
                radius: ring.radius,
                alpha: ring.alpha,
                flux_wb: alpha_to_flux(ring.alpha),
                relativistic: ring.rel_enabled,
            },
            run,
        };
        let outputs = Outputs {
            out: r.out.clone(),
            trial_csv: r.trial_csv.clone(),
            threads: r.threads,
        };
        Ok((config, outputs))
    }

    pub fn packet_spec(&self) -> PacketSpec {
        PacketSpec::new(self.packet.delta_n, self.packet.n0, self.packet.phi0)
            .with_cutoff(self.packet.cutoff)
    }

    pub fn ring_config(&self) -> RingConfig {
        RingConfig {
            mass: self.ring.mass,
            radius: self.ring.radius,
            alpha: self.ring.alpha,
            rel_enabled: self.ring.relativistic,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.run
            .grid_size
            .unwrap_or(fluxring::ring::DEFAULT_GRID_SIZE)
    }

    /// TOML rendering with floats in shortest round-trip form (exponent
    /// notation for very large or small magnitudes).
    pub fn to_toml(&self) -> String {
        let table = toml::Table::try_from(self).expect("resolved config is always representable");
        let mut out = String::new();
        for (key, value) in table.iter().filter(|(_, v)| !v.is_table()) {
            out.push_str(&format!("{key} = {}\n", toml_value(value)));
        }
        for (key, value) in &table {
            if let toml::Value::Table(section) = value {
                out.push_str(&format!("\n[{key}]\n"));
                for (k, v) in section {
                    out.push_str(&format!("{k} = {}\n", toml_value(v)));
                }
            }
        }
        out
    }

    /// The config as `# `-prefixed lines for the top of a CSV file.
    pub fn csv_header(&self) -> String {
        self.to_toml()
            .lines()
            .map(|line| {
                if line.is_empty() {
                    "#\n".to_string()
                } else {
                    format!("# {line}\n")
                }
            })
            .collect()
    }
}

fn toml_value(value: &toml::Value) -> String {
    match value {
        toml::Value::Float(x) => format!("{x:?}"),
        toml::Value::Array(items) => {
            let items: Vec<String> = items.iter().map(toml_value).collect();
            format!("[{}]", items.join(", "))
        }
        other => other.to_string(),
    }
}
