//! SI adapters. The dynamics never see these numbers; they only set the
//! revival time scale and translate webers to the dimensionless flux.

use std::f64::consts::PI;

use physical_constants::{
    ELECTRON_MASS as ELECTRON_MASS_KG, ELEMENTARY_CHARGE, PLANCK_CONSTANT, REDUCED_PLANCK_CONSTANT,
    SPEED_OF_LIGHT_IN_VACUUM,
};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// CODATA electron mass in kilograms.
pub const ELECTRON_MASS: f64 = ELECTRON_MASS_KG;
/// Reduced Planck constant in J s.
pub const HBAR: f64 = REDUCED_PLANCK_CONSTANT;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = SPEED_OF_LIGHT_IN_VACUUM;

/// The full flux quantum `h/e` in webers. `alpha = 1` corresponds to this.
pub fn full_flux_quantum() -> f64 {
    PLANCK_CONSTANT / ELEMENTARY_CHARGE
}

/// The superconducting flux quantum `h/2e`, the modulus of the estimate.
pub fn flux_quantum() -> f64 {
    0.5 * full_flux_quantum()
}

/// Revival time `4 pi m R^2 / hbar` in seconds.
pub fn revival_time(mass: f64, radius: f64) -> f64 {
    4.0 * PI * mass * radius * radius / HBAR
}

/// Converts a flux in webers to `alpha = flux / (h/e)`.
pub fn flux_to_alpha(flux: f64) -> f64 {
    flux / full_flux_quantum()
}

pub fn alpha_to_flux(alpha: f64) -> f64 {
    alpha * full_flux_quantum()
}

/// Reduced Compton wavelength `hbar / (m c)` in meters.
pub fn reduced_compton_wavelength(mass: f64) -> f64 {
    HBAR / (mass * SPEED_OF_LIGHT)
}

/// Physical parameters of one ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    /// Particle mass in kg.
    pub mass: f64,
    /// Ring radius in m.
    pub radius: f64,
    /// Unreduced dimensionless flux, `Phi / (hc/e)`.
    pub alpha: f64,
    /// Whether to include the first-order relativistic kinetic correction.
    pub rel_enabled: bool,
}

impl RingConfig {
    pub fn new(mass: f64, radius: f64, alpha: f64) -> Result<Self> {
        let config = RingConfig {
            mass,
            radius,
            alpha,
            rel_enabled: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn electron(radius: f64, alpha: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS, radius, alpha)
    }

    pub fn with_relativistic(mut self, enabled: bool) -> Self {
        self.rel_enabled = enabled;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::invalid(
                "mass",
                format!("must be positive, got {}", self.mass),
            ));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid(
                "radius",
                format!("must be positive, got {}", self.radius),
            ));
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        Ok(())
    }

    pub fn revival_time(&self) -> f64 {
        revival_time(self.mass, self.radius)
    }

    /// Aharonov-Bohm phase `e Phi / (c hbar) = 2 pi alpha`.
    pub fn ab_phase(&self) -> f64 {
        2.0 * PI * self.alpha
    }

    pub fn flux(&self) -> f64 {
        alpha_to_flux(self.alpha)
    }

    /// Radius in reduced Compton wavelengths.
    pub fn rho(&self) -> f64 {
        self.radius / reduced_compton_wavelength(self.mass)
    }
}
