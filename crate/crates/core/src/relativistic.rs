//! First-order relativistic kinetic correction `-(p^4)/(8 m^3 c^2)` on the
//! ring, in the dimensionless units of [`crate::ring`].
//!
//! With `rho = R / (hbar / m c)` the correction to level `n`, integrated over
//! one revival time, is the phase `pi n^4 / (2 rho^2)`. It is applied to the
//! flux-free `n^4`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::ring::{turn_phase, StateVector};
use crate::units::reduced_compton_wavelength;
use crate::{Error, Result};

/// Factor by which the radius must exceed [`min_radius`] for the correction
/// to count as negligible.
pub const RADIUS_MARGIN: f64 = 10.0;

/// Ring radius in reduced Compton wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RelScale(f64);

impl RelScale {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::invalid(
                "rho",
                format!("must be positive, got {rho}"),
            ));
        }
        Ok(RelScale(rho))
    }

    pub fn from_si(mass: f64, radius: f64) -> Result<Self> {
        Self::new(radius / reduced_compton_wavelength(mass))
    }

    pub fn rho(self) -> f64 {
        self.0
    }
}

/// Extra phase of level `n` after one revival time.
pub fn rel_phase_shift(n: i64, rho: f64) -> f64 {
    let n2 = (n as f64).powi(2);
    PI * n2 * n2 / (2.0 * rho * rho)
}

/// Radius below which the correction spoils a packet of width `delta_n`:
/// `(pi hbar / m c) sqrt(delta_n^5 / 2)`.
pub fn min_radius(delta_n: f64, mass: f64) -> f64 {
    PI * reduced_compton_wavelength(mass) * (delta_n.powi(5) / 2.0).sqrt()
}

/// Largest correction phase over `|n| <= n_max`.
pub fn max_phase_shift(n_max: i64, rho: f64) -> f64 {
    rel_phase_shift(n_max.abs(), rho)
}

/// Spectral evolution including the correction:
/// `a_n -> a_n exp(-i [2 pi (n + alpha)^2 + pi n^4 / (2 rho^2)] tau)`.
pub fn evolve_corrected(
    state: &StateVector,
    tau: f64,
    alpha: f64,
    rho: f64,
) -> Result<StateVector> {
    let rho = RelScale::new(rho)?.rho();
    Ok(state.map_phases(|n| {
        let k = n as f64 + alpha;
        let correction = (rel_phase_shift(n, rho) * tau).rem_euclid(TAU);
        turn_phase(k * k * tau) * Complex64::cis(-correction)
    }))
}
