use std::fmt::Write as _;

use fluxring::grid;
use fluxring::metrology::{
    nominal_angular_resolution, packet_angular_std, ErrorReport, Experiment, TrialRecord,
};
use fluxring::relativistic::{evolve_corrected, max_phase_shift, min_radius, RADIUS_MARGIN};
use fluxring::units::{alpha_to_flux, flux_quantum};
use fluxring::{evolve, make_gaussian_packet, position_density, AngularDensity};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const SIMULATE_COLUMNS: &str = "tau,phi,density";
pub const TRIAL_COLUMNS: &str = "trial,seed,sampled_angle,alpha_true_mod,alpha_est,circular_error";

/// 17 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn experiment(config: &RunConfig) -> Experiment {
    let mut exp = Experiment::new(config.packet_spec(), config.ring.alpha)
        .with_grid_size(config.grid_size())
        .with_shots(config.run.shots.unwrap_or(1));
    if config.ring.relativistic {
        exp = exp.with_relativistic(config.ring_config().rho());
    }
    exp
}

pub struct Snapshot {
    pub tau: f64,
    pub density: AngularDensity,
}

pub fn simulate(config: &RunConfig) -> Result<Vec<Snapshot>> {
    let psi0 = make_gaussian_packet(&config.packet_spec())?;
    let alpha = config.ring.alpha;
    let rho = config.ring.relativistic.then(|| config.ring_config().rho());
    let taus = config.run.taus.as_deref().unwrap_or_default();
    if taus.is_empty() {
        return Err(CliError::config("run.taus must not be empty"));
    }
    taus.iter()
        .map(|&tau| {
            let psi = match rho {
                Some(rho) => evolve_corrected(&psi0, tau, alpha, rho)?,
                None => evolve(&psi0, tau, alpha),
            };
            Ok(Snapshot {
                tau,
                density: position_density(&psi, config.grid_size())?,
            })
        })
        .collect()
}

pub fn simulate_csv(config: &RunConfig, snapshots: &[Snapshot]) -> String {
    let mut out = config.csv_header();
    out.push_str(SIMULATE_COLUMNS);
    out.push('\n');
    for snap in snapshots {
        for (phi, rho) in snap.density.points() {
            writeln!(out, "{},{},{}", sci(snap.tau), sci(phi), sci(rho)).unwrap();
        }
    }
    out
}

/// Flux in both conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flux {
    pub alpha: f64,
    pub webers: f64,
}

impl Flux {
    pub fn from_alpha(alpha: f64) -> Self {
        Flux {
            alpha,
            webers: alpha_to_flux(alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    #[serde(flatten)]
    pub record: TrialRecord,
    pub flux_true: Flux,
    pub flux_true_mod: Flux,
    pub flux_est: Flux,
    pub config: RunConfig,
}

pub fn estimate(config: &RunConfig) -> Result<EstimateReport> {
    let record = experiment(config).run_trial(config.run.seed.unwrap_or(0))?;
    Ok(EstimateReport {
        record,
        flux_true: Flux::from_alpha(config.ring.alpha),
        flux_true_mod: Flux::from_alpha(record.alpha_true_mod),
        flux_est: Flux::from_alpha(record.alpha_est),
        config: config.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    #[serde(flatten)]
    pub report: ErrorReport,
    /// RMS error in webers.
    pub rms_error_wb: f64,
    pub flux_true: Flux,
    pub flux_true_mod: Flux,
    pub config: RunConfig,
}

pub struct McOutput {
    pub report: McReport,
    pub records: Vec<TrialRecord>,
}

pub fn mc(config: &RunConfig) -> Result<McOutput> {
    let exp = experiment(config);
    let records = exp.trials(
        config.run.trials.unwrap_or(crate::config::DEFAULT_TRIALS),
        config.run.seed.unwrap_or(0),
    )?;
    let report = ErrorReport::from_records(config.packet.delta_n, &records);
    let alpha_mod = records
        .first()
        .map(|r| r.alpha_true_mod)
        .unwrap_or(config.ring.alpha);
    Ok(McOutput {
        report: McReport {
            report,
            rms_error_wb: report.rms_relative_error * flux_quantum(),
            flux_true: Flux::from_alpha(config.ring.alpha),
            flux_true_mod: Flux::from_alpha(alpha_mod),
            config: config.clone(),
        },
        records,
    })
}

pub fn trials_csv(config: &RunConfig, records: &[TrialRecord]) -> String {
    let mut out = config.csv_header();
    out.push_str(TRIAL_COLUMNS);
    out.push('\n');
    for (i, r) in records.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{},{},{}",
            r.seed,
            sci(r.sampled_angle),
            sci(r.alpha_true_mod),
            sci(r.alpha_est),
            sci(r.circular_error)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub revival_time_s: f64,
    pub min_radius_m: f64,
    /// Radius over the minimum radius.
    pub radius_ratio: f64,
    /// Whether the radius clears the minimum by the safety margin.
    pub radius_ok: bool,
    pub radius_margin: f64,
    /// Radius in reduced Compton wavelengths.
    pub rho: f64,
    /// Largest relativistic phase over `|n| <= ceil(delta_n)`.
    pub max_phase_shift_rad: f64,
    pub angular_resolution_rad: f64,
    pub packet_angular_std_rad: f64,
    pub flux_quantum_wb: f64,
    pub flux: Flux,
    pub config: RunConfig,
}

pub fn feasibility(config: &RunConfig) -> Result<FeasibilityReport> {
    let ring = config.ring_config();
    ring.validate()?;
    let dn = config.packet.delta_n;
    let r_min = min_radius(dn, ring.mass);
    let rho = ring.rho();
    Ok(FeasibilityReport {
        revival_time_s: ring.revival_time(),
        min_radius_m: r_min,
        radius_ratio: ring.radius / r_min,
        radius_ok: ring.radius >= RADIUS_MARGIN * r_min,
        radius_margin: RADIUS_MARGIN,
        rho,
        max_phase_shift_rad: max_phase_shift(dn.ceil() as i64, rho),
        angular_resolution_rad: nominal_angular_resolution(dn),
        packet_angular_std_rad: packet_angular_std(dn),
        flux_quantum_wb: flux_quantum(),
        flux: Flux::from_alpha(config.ring.alpha),
        config: config.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub tau: f64,
    pub steps: usize,
    /// Grid against spectral wavefunction at `dtau`.
    pub l2: f64,
    /// Same at `dtau / 2`.
    pub l2_half_step: f64,
    /// `l2 / l2_half_step`, about 4 for a second-order scheme.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub grid_size: usize,
    pub dtau: f64,
    pub rows: Vec<OracleRow>,
    pub config: RunConfig,
}

pub fn oracle(config: &RunConfig) -> Result<OracleReport> {
    let psi0 = make_gaussian_packet(&config.packet_spec())?;
    let m = config.grid_size();
    let dtau = config.run.dtau.unwrap_or(crate::config::DEFAULT_DTAU);
    let alpha = config.ring.alpha;
    let taus = config.run.taus.as_deref().unwrap_or_default();
    if taus.is_empty() {
        return Err(CliError::config("run.taus must not be empty"));
    }
    let rows = taus
        .iter()
        .map(|&tau| {
            let l2 = grid::spectral_distance(&psi0, tau, alpha, m, dtau)?;
            let l2_half_step = grid::spectral_distance(&psi0, tau, alpha, m, dtau / 2.0)?;
            Ok(OracleRow {
                tau,
                steps: grid::step_count(tau, dtau),
                l2,
                l2_half_step,
                ratio: l2 / l2_half_step,
            })
        })
        .collect::<Result<_>>()?;
    Ok(OracleReport {
        grid_size: m,
        dtau,
        rows,
        config: config.clone(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
