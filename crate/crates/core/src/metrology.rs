//! Single-shot flux estimation.
//!
//! One electron is prepared in a Gaussian packet, left alone for one revival
//! time, and detected once. The revival has rotated the packet by
//! `4 pi alpha`, so a single detected angle gives `alpha mod 1/2`, i.e. the
//! flux modulo `hc/2e`.

use std::f64::consts::PI;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circular::{distance, mean_direction, signed_offset, wrap, wrap_angle};
use crate::relativistic::evolve_corrected;
use crate::ring::{evolve, make_gaussian_packet, position_density, AngularDensity, PacketSpec};
use crate::{Error, Result};

/// Period of the dimensionless flux as seen by the revival, `Phi_0 = hc/2e`.
pub const ALPHA_PERIOD: f64 = 0.5;

/// Fewest trials accepted by [`monte_carlo`].
pub const MIN_TRIALS: usize = 100;

/// Angular resolution `1/(pi dn)` commonly quoted for a packet of width `dn`.
pub fn nominal_angular_resolution(delta_n: f64) -> f64 {
    1.0 / (PI * delta_n)
}

/// Standard deviation of the density of `a_n ~ exp(-n^2/dn^2)` in the
/// narrow-packet limit, where the density is Gaussian with variance `1/dn^2`.
pub fn packet_angular_std(delta_n: f64) -> f64 {
    1.0 / delta_n
}

/// Inverse-CDF sampler over a piecewise-constant grid density.
///
/// Bin `k` covers `[phi_k - h/2, phi_k + h/2)`, so the sampled law has the
/// same centre as the grid values.
#[derive(Debug, Clone)]
pub struct PositionSampler {
    cdf: Vec<f64>,
    step: f64,
}

impl PositionSampler {
    pub fn new(density: &AngularDensity) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = density
            .values()
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        let total = acc;
        cdf.iter_mut().for_each(|c| *c /= total);
        PositionSampler {
            cdf,
            step: density.step(),
        }
    }

    /// Maps `u` in `[0, 1)` to an angle in `[0, 2 pi)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let last = self.cdf.len() - 1;
        let k = self.cdf.partition_point(|&c| c <= u).min(last);
        let lower = if k == 0 { 0.0 } else { self.cdf[k - 1] };
        let mass = self.cdf[k] - lower;
        let frac = if mass > 0.0 {
            ((u - lower) / mass).clamp(0.0, 1.0)
        } else {
            0.5
        };
        wrap_angle(self.step * (k as f64 + frac - 0.5))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of trial `index` in a run started from `base_seed`.
///
/// Each index reads its own ChaCha stream, so seeds depend only on
/// `(base_seed, index)` and never on scheduling.
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    let mut rng = seeded_rng(base_seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// One simulated position measurement, deterministic in `seed`.
pub fn sample_position(density: &AngularDensity, seed: u64) -> f64 {
    PositionSampler::new(density).sample(&mut seeded_rng(seed))
}

/// Inverts `phi = phi0 + 4 pi alpha`; the result lies in `[0, 1/2)`.
pub fn estimate_flux(sampled_angle: f64, phi0: f64) -> f64 {
    wrap(wrap_angle(sampled_angle - phi0) / (4.0 * PI), ALPHA_PERIOD)
}

/// Multi-slit grating with slit spacing equal to the wavelength: the two
/// outgoing line angles for a flux of `flux_ratio` quanta `hc/2e` between
/// neighbouring slits.
pub fn grating_angles(flux_ratio: f64) -> (f64, f64) {
    let f = wrap(flux_ratio, 1.0);
    (f.asin(), (f - 1.0).asin())
}

/// A single simulated experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    /// Detected angle in `[0, 2 pi)`.
    pub sampled_angle: f64,
    /// True flux reduced to `[0, 1/2)`.
    pub alpha_true_mod: f64,
    /// Estimated flux in `[0, 1/2)`.
    pub alpha_est: f64,
    /// Distance between estimate and truth on the `alpha mod 1/2` circle.
    pub circular_error: f64,
}

impl TrialRecord {
    fn new(seed: u64, sampled_angle: f64, phi0: f64, alpha: f64) -> Self {
        let alpha_true_mod = wrap(alpha, ALPHA_PERIOD);
        let alpha_est = estimate_flux(sampled_angle, phi0);
        TrialRecord {
            seed,
            sampled_angle,
            alpha_true_mod,
            alpha_est,
            circular_error: distance(alpha_true_mod, alpha_est, ALPHA_PERIOD),
        }
    }

    /// Estimate minus truth, in `[-1/4, 1/4)`.
    pub fn signed_error(&self) -> f64 {
        signed_offset(self.alpha_true_mod, self.alpha_est, ALPHA_PERIOD)
    }
}

/// Error statistics of many independent single-shot trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub delta_n: f64,
    pub trials: usize,
    /// RMS circular error divided by the period 1/2, i.e. relative to `Phi_0`.
    pub rms_relative_error: f64,
    /// Mean signed circular error, also relative to `Phi_0`.
    pub mean_bias: f64,
}

impl ErrorReport {
    pub fn from_records(delta_n: f64, records: &[TrialRecord]) -> Self {
        let n = records.len() as f64;
        let mean_sq = records
            .iter()
            .map(|r| r.circular_error.powi(2))
            .sum::<f64>()
            / n;
        let bias = records.iter().map(TrialRecord::signed_error).sum::<f64>() / n;
        ErrorReport {
            delta_n,
            trials: records.len(),
            rms_relative_error: mean_sq.sqrt() / ALPHA_PERIOD,
            mean_bias: bias / ALPHA_PERIOD,
        }
    }
}

/// Full setup of a flux measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    pub packet: PacketSpec,
    /// Unreduced dimensionless flux.
    pub alpha: f64,
    /// Density grid; `None` picks the default for the packet.
    pub grid_size: Option<usize>,
    /// Radius in reduced Compton wavelengths; `Some` switches on the
    /// relativistic correction.
    pub rho: Option<f64>,
    /// Detections per trial. The method itself uses one; larger values
    /// average several independent electrons.
    pub shots: usize,
}

impl Experiment {
    pub fn new(packet: PacketSpec, alpha: f64) -> Self {
        Experiment {
            packet,
            alpha,
            grid_size: None,
            rho: None,
            shots: 1,
        }
    }

    pub fn with_grid_size(mut self, grid_size: usize) -> Self {
        self.grid_size = Some(grid_size);
        self
    }

    pub fn with_relativistic(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn with_shots(mut self, shots: usize) -> Self {
        self.shots = shots;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if self.shots == 0 {
            return Err(Error::invalid("shots", "need at least one detection"));
        }
        Ok(())
    }

    /// Density at the revival time.
    ///
    /// At `tau = 1` the flux only enters modulo 1/2 (the difference is a
    /// global phase), so the reduced flux is used and fluxes one period
    /// apart give bit-identical densities.
    pub fn final_density(&self) -> Result<AngularDensity> {
        self.validate()?;
        let psi0 = make_gaussian_packet(&self.packet)?;
        let alpha = wrap(self.alpha, ALPHA_PERIOD);
        let evolved = match self.rho {
            Some(rho) => evolve_corrected(&psi0, 1.0, alpha, rho)?,
            None => evolve(&psi0, 1.0, alpha),
        };
        let grid_size = self.grid_size.unwrap_or_else(|| psi0.default_grid_size());
        position_density(&evolved, grid_size)
    }

    fn detect(&self, sampler: &PositionSampler, seed: u64) -> TrialRecord {
        let mut rng = seeded_rng(seed);
        let angle = if self.shots == 1 {
            sampler.sample(&mut rng)
        } else {
            let draws: Vec<f64> = (0..self.shots).map(|_| sampler.sample(&mut rng)).collect();
            mean_direction(draws.into_iter().map(|a| (a, 1.0))).0
        };
        TrialRecord::new(seed, angle, self.packet.phi0, self.alpha)
    }

    pub fn run_trial(&self, seed: u64) -> Result<TrialRecord> {
        let sampler = PositionSampler::new(&self.final_density()?);
        Ok(self.detect(&sampler, seed))
    }

    /// Runs `trials` trials with seeds `derive_seed(base_seed, i)`.
    ///
    /// Records come back in trial order whatever the thread count.
    pub fn trials(&self, trials: usize, base_seed: u64) -> Result<Vec<TrialRecord>> {
        if trials < MIN_TRIALS {
            return Err(Error::invalid(
                "trials",
                format!("need at least {MIN_TRIALS}, got {trials}"),
            ));
        }
        let sampler = PositionSampler::new(&self.final_density()?);
        Ok((0..trials as u64)
            .into_par_iter()
            .map(|i| self.detect(&sampler, derive_seed(base_seed, i)))
            .collect())
    }

    pub fn monte_carlo(&self, trials: usize, base_seed: u64) -> Result<ErrorReport> {
        let records = self.trials(trials, base_seed)?;
        Ok(ErrorReport::from_records(self.packet.delta_n, &records))
    }
}

/// Single-shot trial with default settings.
pub fn run_trial(spec: &PacketSpec, alpha: f64, seed: u64) -> Result<TrialRecord> {
    Experiment::new(*spec, alpha).run_trial(seed)
}

/// Monte Carlo error budget with default settings.
pub fn monte_carlo(
    spec: &PacketSpec,
    alpha: f64,
    trials: usize,
    base_seed: u64,
) -> Result<ErrorReport> {
    Experiment::new(*spec, alpha).monte_carlo(trials, base_seed)
}

/// Kolmogorov-Smirnov distance between sorted samples and a continuous CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
