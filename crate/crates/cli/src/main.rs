use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fluxring_cli::{Command, Overrides};

#[derive(Parser)]
#[command(
    name = "fluxring",
    version,
    about = "Flux-threaded ring revivals and single-shot flux estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write density snapshots over a list of times as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated times in revival periods.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        taus: Option<Vec<f64>>,
    },
    /// Run one single-shot trial.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seeded: Seeded,
    },
    /// Monte Carlo error budget of the estimator.
    Mc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        seeded: Seeded,
        #[arg(long)]
        trials: Option<usize>,
        /// Also write every trial to this CSV file.
        #[arg(long)]
        trial_csv: Option<PathBuf>,
    },
    /// Revival time, minimum radius and resolution for a ring.
    Feasibility {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the grid propagator with spectral evolution.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        #[arg(long)]
        dtau: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML config, or a previous CSV/JSON output to replay.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    delta_n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    n0: Option<i64>,
    #[arg(long)]
    phi0: Option<f64>,
    #[arg(long)]
    cutoff: Option<i64>,
    /// Flux in units of h/e.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "flux_wb")]
    alpha: Option<f64>,
    /// Flux in webers.
    #[arg(long, allow_hyphen_values = true)]
    flux_wb: Option<f64>,
    /// Particle mass in kg.
    #[arg(long)]
    mass: Option<f64>,
    /// Ring radius in metres.
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<f64>,
    /// Include the first relativistic correction.
    #[arg(long)]
    relativistic: bool,
    #[arg(long)]
    grid_size: Option<usize>,
}

#[derive(Args)]
struct Seeded {
    #[arg(long)]
    seed: Option<u64>,
    /// Detections averaged per trial.
    #[arg(long)]
    shots: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta_n: self.delta_n,
            n0: self.n0,
            phi0: self.phi0,
            cutoff: self.cutoff,
            mass: self.mass,
            radius: self.radius,
            alpha: self.alpha,
            flux_wb: self.flux_wb,
            relativistic: self.relativistic.then_some(true),
            grid_size: self.grid_size,
            out: self.out.clone(),
            threads: self.threads,
            ..Overrides::default()
        }
    }
}

impl Seeded {
    fn apply(&self, o: &mut Overrides) {
        o.seed = self.seed;
        o.shots = self.shots;
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, overrides) = match &cli.command {
        Cmd::Simulate { common, taus } => {
            let mut o = common.overrides();
            o.taus = taus.clone();
            (Command::Simulate, common, o)
        }
        Cmd::Estimate { common, seeded } => {
            let mut o = common.overrides();
            seeded.apply(&mut o);
            (Command::Estimate, common, o)
        }
        Cmd::Mc {
            common,
            seeded,
            trials,
            trial_csv,
        } => {
            let mut o = common.overrides();
            seeded.apply(&mut o);
            o.trials = *trials;
            o.trial_csv = trial_csv.clone();
            (Command::Mc, common, o)
        }
        Cmd::Feasibility { common } => (Command::Feasibility, common, common.overrides()),
        Cmd::Oracle { common, taus, dtau } => {
            let mut o = common.overrides();
            o.taus = taus.clone();
            o.dtau = *dtau;
            (Command::Oracle, common, o)
        }
    };
    match fluxring_cli::run(command, common.config.as_deref(), &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fluxring {command}: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
