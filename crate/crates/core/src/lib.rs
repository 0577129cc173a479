//! Revival dynamics of a single charged particle confined to a ring threaded
//! by a magnetic flux, and single-shot estimation of that flux modulo `hc/2e`.
//!
//! Everything dynamical is dimensionless: time is measured in units of the
//! revival time `T = 4 pi m R^2 / hbar` (`tau = t / T`) and flux in units of the
//! full quantum `hc/e` (`alpha`). In these units a level `|n>` picks up the
//! phase `exp(-2 pi i (n + alpha)^2 tau)`, so at `tau = 1` every packet returns
//! to its initial shape rotated by `4 pi alpha`, which is twice the
//! Aharonov-Bohm phase. SI quantities only enter through [`units`].
//!
//! Modules:
//!
//! - [`ring`]: state vectors, Gaussian packets, exact spectral evolution and
//!   angular densities.
//! - [`revival`]: return-probability scans, peak location and fractional
//!   revival lobes.
//! - [`metrology`]: simulated position measurement, the flux estimator and
//!   Monte Carlo error budgets.
//! - [`relativistic`]: first-order kinetic corrections and the radius bound.
//! - [`grid`]: an independent real-space Cayley propagator used to validate
//!   the spectral engine.

pub mod circular;
pub mod error;
pub mod grid;
pub mod metrology;
pub mod relativistic;
pub mod revival;
pub mod ring;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use ring::{
    evolve, fidelity, make_gaussian_packet, position_density, rotate, AngularDensity, PacketSpec,
    StateVector,
};
pub use units::RingConfig;
