//! Spectral representation of the particle on the ring.
//!
//! A state is a finite superposition `sum_n a_n |n>` over angular momentum
//! levels, with `<phi|n> = exp(i n phi) / sqrt(2 pi)`. The Hamiltonian is
//! diagonal in this basis, so evolution is an exact phase per level.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Default number of points in an angular density grid.
pub const DEFAULT_GRID_SIZE: usize = 1024;

/// Minimum number of grid points per retained level in a density grid.
pub const GRID_OVERSAMPLING: usize = 4;

/// Smallest cutoff ever used, whatever the width.
pub const MIN_CUTOFF: i64 = 8;

/// `exp(-2 pi i turns)`, with the integer part of `turns` removed first so
/// that whole turns are exactly the identity.
#[inline]
pub(crate) fn turn_phase(turns: f64) -> Complex64 {
    let frac = turns - turns.round();
    Complex64::cis(-TAU * frac)
}

/// Amplitudes on the contiguous level range `[n_min, n_max]`, always unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_min: i64,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes starting at level `n_min` and
    /// normalizes it.
    pub fn from_amplitudes(n_min: i64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid(
                "amplitudes",
                "state needs at least one level",
            ));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::invalid("amplitudes", "non-finite amplitude"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid(
                "amplitudes",
                "zero vector cannot be normalized",
            ));
        }
        let scale = 1.0 / norm;
        let amplitudes = amplitudes.into_iter().map(|a| a * scale).collect();
        Ok(StateVector { n_min, amplitudes })
    }

    /// The angular momentum eigenstate `|n>`.
    pub fn basis(n: i64) -> Self {
        StateVector {
            n_min: n,
            amplitudes: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.amplitudes.len() as i64 - 1
    }

    /// Number of retained levels.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of level `n`, zero outside the stored range.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[(n - self.n_min) as usize]
        }
    }

    /// Iterates over `(n, a_n)`.
    pub fn levels(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.n_min + i as i64, a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mean level `sum n |a_n|^2`.
    pub fn mean_level(&self) -> f64 {
        self.levels().map(|(n, a)| n as f64 * a.norm_sqr()).sum()
    }

    /// Applies a per-level unimodular factor. Norm is unchanged up to rounding.
    pub(crate) fn map_phases(&self, phase: impl Fn(i64) -> Complex64) -> Self {
        StateVector {
            n_min: self.n_min,
            amplitudes: self.levels().map(|(n, a)| a * phase(n)).collect(),
        }
    }

    /// Smallest grid that satisfies the oversampling rule, never below
    /// [`DEFAULT_GRID_SIZE`], rounded up to a power of two.
    pub fn default_grid_size(&self) -> usize {
        (GRID_OVERSAMPLING * self.len())
            .next_power_of_two()
            .max(DEFAULT_GRID_SIZE)
    }

    pub(crate) fn check_grid(&self, grid_size: usize) -> Result<()> {
        let required = GRID_OVERSAMPLING * self.len();
        if grid_size < required {
            return Err(Error::UndersizedGrid {
                grid_size,
                levels: self.len(),
                required,
            });
        }
        Ok(())
    }
}

/// Parameters of a Gaussian-truncated packet
/// `a_n ~ exp(-(n - n0)^2 / delta_n^2) exp(-i n phi0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub delta_n: f64,
    pub n0: i64,
    pub phi0: f64,
    /// Levels kept: `n0 - cutoff ..= n0 + cutoff`.
    pub cutoff: i64,
}

impl PacketSpec {
    /// A packet with the default cutoff `max(ceil(6 delta_n), 8)`.
    pub fn new(delta_n: f64, n0: i64, phi0: f64) -> Self {
        PacketSpec {
            delta_n,
            n0,
            phi0,
            cutoff: Self::default_cutoff(delta_n),
        }
    }

    pub fn centered(delta_n: f64) -> Self {
        Self::new(delta_n, 0, 0.0)
    }

    pub fn with_cutoff(mut self, cutoff: i64) -> Self {
        self.cutoff = cutoff;
        self
    }

    /// Smallest admissible cutoff: the Gaussian tail is ~e^-36 there.
    pub fn required_cutoff(delta_n: f64) -> i64 {
        (6.0 * delta_n).ceil() as i64
    }

    pub fn default_cutoff(delta_n: f64) -> i64 {
        if delta_n.is_finite() && delta_n > 0.0 {
            Self::required_cutoff(delta_n).max(MIN_CUTOFF)
        } else {
            MIN_CUTOFF
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_n.is_finite() && self.delta_n > 0.0) {
            return Err(Error::invalid(
                "delta_n",
                format!("must be positive, got {}", self.delta_n),
            ));
        }
        if !self.phi0.is_finite() {
            return Err(Error::invalid("phi0", "must be finite"));
        }
        let required = Self::required_cutoff(self.delta_n);
        if self.cutoff < required {
            return Err(Error::CutoffTooSmall {
                delta_n: self.delta_n,
                cutoff: self.cutoff,
                required,
            });
        }
        Ok(())
    }
}

/// Builds the normalized Gaussian packet described by `spec`.
pub fn make_gaussian_packet(spec: &PacketSpec) -> Result<StateVector> {
    spec.validate()?;
    let n_min = spec.n0 - spec.cutoff;
    let inv_width2 = 1.0 / (spec.delta_n * spec.delta_n);
    let turns = spec.phi0 / TAU;
    let amplitudes = (0..=2 * spec.cutoff)
        .map(|i| {
            let n = n_min + i;
            let offset = (n - spec.n0) as f64;
            turn_phase(n as f64 * turns) * (-offset * offset * inv_width2).exp()
        })
        .collect();
    StateVector::from_amplitudes(n_min, amplitudes)
}

/// Exact evolution for dimensionless time `tau = t/T` under flux `alpha`:
/// `a_n -> a_n exp(-2 pi i (n + alpha)^2 tau)`.
pub fn evolve(state: &StateVector, tau: f64, alpha: f64) -> StateVector {
    state.map_phases(|n| {
        let k = n as f64 + alpha;
        turn_phase(k * k * tau)
    })
}

/// Rigid rotation of the density by `angle`: `a_n -> a_n exp(-i n angle)`.
pub fn rotate(state: &StateVector, angle: f64) -> StateVector {
    let turns = angle / TAU;
    state.map_phases(|n| turn_phase(n as f64 * turns))
}

/// `|<a|b>|^2`, treating levels outside either range as zero.
pub fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    let lo = a.n_min().max(b.n_min());
    let hi = a.n_max().min(b.n_max());
    let overlap: Complex64 = (lo..=hi)
        .map(|n| a.amplitude(n).conj() * b.amplitude(n))
        .sum();
    overlap.norm_sqr().min(1.0)
}

/// Probability density sampled at `phi_k = 2 pi k / M`, `k = 0..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularDensity {
    values: Vec<f64>,
}

impl AngularDensity {
    const INTEGRAL_TOLERANCE: f64 = 1e-9;

    /// Wraps grid values, rescaling them so they integrate to one.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("density", "empty grid"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "density",
                "values must be finite and non-negative",
            ));
        }
        let integral = values.iter().sum::<f64>() * TAU / values.len() as f64;
        if integral <= 0.0 {
            return Err(Error::invalid("density", "zero total probability"));
        }
        if (integral - 1.0).abs() > Self::INTEGRAL_TOLERANCE {
            values.iter_mut().for_each(|v| *v /= integral);
        }
        Ok(AngularDensity { values })
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing `2 pi / M`.
    pub fn step(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.step() * k as f64
    }

    /// `(phi_k, value_k)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let step = self.step();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (step * k as f64, v))
    }

    /// Riemann sum of the density over the grid; one by construction.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step()
    }

    /// Largest pointwise absolute difference. Panics on mismatched grids.
    pub fn max_abs_diff(&self, other: &AngularDensity) -> f64 {
        assert_eq!(self.grid_size(), other.grid_size(), "grid sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `sqrt(int |p - q|^2 dphi)` on the shared grid. Panics on mismatched grids.
    pub fn l2_distance(&self, other: &AngularDensity) -> f64 {
        assert_eq!(self.grid_size(), other.grid_size(), "grid sizes differ");
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (sum * self.step()).sqrt()
    }
}

/// Samples `|psi(phi)|^2` on a uniform grid of `grid_size` points.
///
/// The synthesis `psi(phi_k) = sum_n a_n exp(i n phi_k)` is an inverse DFT
/// once each level is folded onto index `n mod M`; the oversampling rule makes
/// that folding collision-free.
pub fn position_density(state: &StateVector, grid_size: usize) -> Result<AngularDensity> {
    state.check_grid(grid_size)?;
    let mut buffer = vec![Complex64::new(0.0, 0.0); grid_size];
    let m = grid_size as i64;
    for (n, a) in state.levels() {
        buffer[n.rem_euclid(m) as usize] += a;
    }
    FftPlanner::new()
        .plan_fft_inverse(grid_size)
        .process(&mut buffer);
    let values = buffer.iter().map(|psi| psi.norm_sqr() / TAU).collect();
    AngularDensity::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn argmax(density: &AngularDensity) -> f64 {
        let (k, _) = density
            .values()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |best, (k, &v)| if v > best.1 { (k, v) } else { best },
            );
        density.angle(k)
    }

    #[test]
    fn narrow_packet_is_a_single_level() {
        let state = make_gaussian_packet(&PacketSpec::new(0.01, 3, 0.0)).unwrap();
        assert!(state.amplitude(3).norm_sqr() > 1.0 - 1e-10);
        assert_eq!(state.n_min(), 3 - MIN_CUTOFF);
        assert_eq!(state.n_max(), 3 + MIN_CUTOFF);
    }

    #[test]
    fn centered_packet_density_is_even_and_peaked_at_zero() {
        let state = make_gaussian_packet(&PacketSpec::centered(10.0)).unwrap();
        let density = position_density(&state, DEFAULT_GRID_SIZE).unwrap();
        assert_eq!(argmax(&density), 0.0);
        let v = density.values();
        let m = v.len();
        for k in 1..m / 2 {
            assert!((v[k] - v[m - k]).abs() < 1e-12, "asymmetry at k={k}");
        }
    }

    #[test]
    fn phase_factor_moves_the_packet() {
        let state = make_gaussian_packet(&PacketSpec::new(10.0, 0, PI)).unwrap();
        let density = position_density(&state, DEFAULT_GRID_SIZE).unwrap();
        assert!((argmax(&density) - PI).abs() < 1e-12);
    }

    #[test]
    fn packet_constructor_errors() {
        assert!(matches!(
            make_gaussian_packet(&PacketSpec::centered(0.0)),
            Err(Error::InvalidParameter {
                field: "delta_n",
                ..
            })
        ));
        assert!(make_gaussian_packet(&PacketSpec::centered(-2.0)).is_err());
        assert!(matches!(
            make_gaussian_packet(&PacketSpec::centered(10.0).with_cutoff(59)),
            Err(Error::CutoffTooSmall { required: 60, .. })
        ));
        assert!(make_gaussian_packet(&PacketSpec::centered(10.0).with_cutoff(60)).is_ok());
        assert_eq!(PacketSpec::centered(10.0).cutoff, 60);
        assert_eq!(PacketSpec::centered(0.3).cutoff, MIN_CUTOFF);
    }

    #[test]
    fn ground_level_never_moves() {
        let state = StateVector::basis(0);
        for tau in [0.0, 0.123, 1.0, 17.5] {
            assert_eq!(evolve(&state, tau, 0.0), state);
        }
    }

    #[test]
    fn full_revival_without_flux() {
        let state = make_gaussian_packet(&PacketSpec::new(7.3, -2, 1.1)).unwrap();
        assert!((fidelity(&evolve(&state, 1.0, 0.0), &state) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_flux_revival_is_a_half_turn() {
        let state = make_gaussian_packet(&PacketSpec::new(4.0, 1, 0.4)).unwrap();
        let evolved = evolve(&state, 1.0, 0.25);
        assert!((fidelity(&evolved, &rotate(&state, PI)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_identities() {
        let state = make_gaussian_packet(&PacketSpec::new(3.0, 2, 0.7)).unwrap();
        assert_eq!(rotate(&state, 0.0), state);
        assert_eq!(rotate(&state, TAU), state);
        let packet = make_gaussian_packet(&PacketSpec::centered(10.0)).unwrap();
        let density = position_density(&rotate(&packet, PI / 2.0), DEFAULT_GRID_SIZE).unwrap();
        assert!((argmax(&density) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn basis_state_density_is_uniform() {
        for n in [-7, 0, 3] {
            let density = position_density(&StateVector::basis(n), 64).unwrap();
            for &v in density.values() {
                assert!((v - 1.0 / TAU).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_level_density_matches_hand_expansion() {
        let s = 1.0 / 2f64.sqrt();
        let state =
            StateVector::from_amplitudes(0, vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)])
                .unwrap();
        let density = position_density(&state, 32).unwrap();
        for (phi, v) in density.points() {
            assert!((v - (1.0 + phi.cos()) / TAU).abs() < 1e-14, "phi={phi}");
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let state = make_gaussian_packet(&PacketSpec::new(12.0, 5, 2.0)).unwrap();
        let state = evolve(&state, 0.37, 0.11);
        let density = position_density(&state, state.default_grid_size()).unwrap();
        assert!((density.integral() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let state = make_gaussian_packet(&PacketSpec::centered(10.0)).unwrap();
        assert!(matches!(
            position_density(&state, 256),
            Err(Error::UndersizedGrid {
                levels: 121,
                required: 484,
                ..
            })
        ));
        assert_eq!(state.default_grid_size(), 1024);
    }

    #[test]
    fn fwhm_follows_inverse_width() {
        // For a_n ~ exp(-n^2/dn^2) the density is ~exp(-dn^2 phi^2 / 2), so
        // FWHM * dn = 2 sqrt(2 ln 2).
        let dn = 10.0;
        let density = position_density(
            &make_gaussian_packet(&PacketSpec::centered(dn)).unwrap(),
            8192,
        )
        .unwrap();
        let v = density.values();
        let half = 0.5 * v[0];
        let k = v.iter().position(|&x| x < half).unwrap();
        let frac = (v[k - 1] - half) / (v[k - 1] - v[k]);
        let hwhm = density.step() * (k as f64 - 1.0 + frac);
        let expected = 2.0 * (2.0 * 2f64.ln()).sqrt();
        assert!(((2.0 * hwhm * dn) - expected).abs() / expected < 1e-3);
    }

    #[test]
    fn fidelity_basics() {
        let psi = make_gaussian_packet(&PacketSpec::new(5.0, 0, 1.0)).unwrap();
        assert!((fidelity(&psi, &psi) - 1.0).abs() < 1e-14);
        assert_eq!(
            fidelity(&StateVector::basis(0), &StateVector::basis(1)),
            0.0
        );
        // even-only support: (-1)^n = 1
        let even = StateVector::from_amplitudes(
            -4,
            (-4..=4)
                .map(|n: i64| {
                    if n % 2 == 0 {
                        Complex64::new((-(n * n) as f64 / 9.0).exp(), 0.3 * n as f64)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        )
        .unwrap();
        assert!((fidelity(&even, &rotate(&even, PI)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_pads_disjoint_ranges() {
        let a = make_gaussian_packet(&PacketSpec::new(2.0, 0, 0.0)).unwrap();
        let b = make_gaussian_packet(&PacketSpec::new(2.0, 3, 0.0)).unwrap();
        let expected: f64 = {
            let s: Complex64 = (-20..=20)
                .map(|n| a.amplitude(n).conj() * b.amplitude(n))
                .sum();
            s.norm_sqr()
        };
        assert!((fidelity(&a, &b) - expected).abs() < 1e-15);
        assert!((fidelity(&a, &b) - fidelity(&b, &a)).abs() < 1e-15);
    }
}
