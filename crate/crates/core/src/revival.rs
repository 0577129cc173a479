//! Full and fractional revival analysis.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circular::{angular_distance, mean_direction, wrap_angle};
use crate::ring::{evolve, fidelity, position_density, AngularDensity, StateVector};
use crate::{Error, Result};

/// Largest fraction denominator handled by [`fractional_lobes`].
pub const MAX_FRACTION: u32 = 12;

/// Detection thresholds for peak finding and lobe bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakThresholds {
    /// Densities with circular variance at or above this are too broad.
    pub max_circular_variance: f64,
    /// Mean resultant length below this means there is no direction at all.
    pub min_resultant: f64,
    /// Secondary lobe mass, as a fraction of the primary, that makes a
    /// density multimodal.
    pub max_secondary_ratio: f64,
    /// Fractional-revival lobes lighter than this are dropped.
    pub min_lobe_weight: f64,
    /// Bins below this fraction of the maximum separate lobes.
    pub lobe_floor: f64,
}

impl Default for PeakThresholds {
    fn default() -> Self {
        PeakThresholds {
            max_circular_variance: 0.9,
            min_resultant: 0.05,
            max_secondary_ratio: 0.25,
            min_lobe_weight: 1e-3,
            lobe_floor: 0.05,
        }
    }
}

/// Return probability `|<psi0|psi(tau)>|^2` along a sorted time grid.
pub fn autocorrelation_scan(
    psi0: &StateVector,
    alpha: f64,
    tau_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if tau_grid.is_empty() {
        return Err(Error::invalid("tau_grid", "empty"));
    }
    if tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("tau_grid", "non-finite time"));
    }
    if tau_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("tau_grid", "must be sorted"));
    }
    Ok(tau_grid
        .par_iter()
        .map(|&tau| (tau, fidelity(psi0, &evolve(psi0, tau, alpha))))
        .collect())
}

/// A contiguous run of bins above the lobe floor.
#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    len: usize,
    mass: f64,
    peak: usize,
}

fn lobe_runs(density: &AngularDensity, floor: f64) -> Vec<Run> {
    let v = density.values();
    let m = v.len();
    let vmax = v.iter().copied().fold(0.0, f64::max);
    let level = floor * vmax;
    let step = density.step();
    let Some(gap) = v.iter().position(|&x| x < level) else {
        let peak = argmax(v, 0, m);
        return vec![Run {
            start: 0,
            len: m,
            mass: 1.0,
            peak,
        }];
    };
    let mut runs = Vec::new();
    let mut i = 0;
    while i < m {
        let k = (gap + i) % m;
        if v[k] < level {
            i += 1;
            continue;
        }
        let mut len = 0;
        while i + len < m && v[(gap + i + len) % m] >= level {
            len += 1;
        }
        let mass = (0..len).map(|j| v[(k + j) % m]).sum::<f64>() * step;
        runs.push(Run {
            start: k,
            len,
            mass,
            peak: argmax(v, k, len),
        });
        i += len;
    }
    runs
}

fn argmax(v: &[f64], start: usize, len: usize) -> usize {
    let m = v.len();
    let mut best = start % m;
    for j in 1..len {
        let k = (start + j) % m;
        if v[k] > v[best] {
            best = k;
        }
    }
    best
}

/// Vertex of the parabola through the argmax bin and its neighbours, in bins.
fn parabolic_offset(v: &[f64], k: usize) -> f64 {
    let m = v.len();
    let (l, c, r) = (v[(k + m - 1) % m], v[k], v[(k + 1) % m]);
    let curvature = l - 2.0 * c + r;
    if curvature >= 0.0 {
        return 0.0;
    }
    (0.5 * (l - r) / curvature).clamp(-0.5, 0.5)
}

/// Location of the dominant lobe, in `[0, 2 pi)`.
pub fn peak_angle(density: &AngularDensity) -> Result<f64> {
    peak_angle_with(density, &PeakThresholds::default())
}

/// [`peak_angle`] with explicit thresholds.
///
/// The estimate is the circular mean direction of the density restricted to
/// a window centred on the parabolically refined argmax of the primary lobe,
/// wide enough to contain that whole lobe. For a single lobe spanning the
/// circle this is the plain circular mean.
pub fn peak_angle_with(density: &AngularDensity, thresholds: &PeakThresholds) -> Result<f64> {
    let runs = lobe_runs(density, thresholds.lobe_floor);
    let mut by_mass = runs.clone();
    by_mass.sort_by(|a, b| b.mass.total_cmp(&a.mass));
    let primary = by_mass[0];
    if let Some(secondary) = by_mass.get(1) {
        let ratio = secondary.mass / primary.mass;
        if ratio > thresholds.max_secondary_ratio {
            return Err(Error::MultiModal { ratio });
        }
    }

    let (_, resultant) = mean_direction(density.points());
    if resultant < thresholds.min_resultant {
        return Err(Error::UniformDensity { resultant });
    }
    let variance = 1.0 - resultant;
    if variance >= thresholds.max_circular_variance {
        return Err(Error::BroadDensity { variance });
    }

    let step = density.step();
    let v = density.values();
    let center = wrap_angle(step * (primary.peak as f64 + parabolic_offset(v, primary.peak)));
    let half_width = if primary.len == v.len() {
        PI
    } else {
        let first = density.angle(primary.start);
        let last = density.angle((primary.start + primary.len - 1) % v.len());
        angular_distance(center, first)
            .max(angular_distance(center, last))
            .min(PI)
    };
    // Edge bins count with the fraction of their width inside the window,
    // which keeps the window symmetric about a sub-bin centre.
    let (direction, _) = mean_direction(density.points().filter_map(|(phi, value)| {
        let d = angular_distance(phi, center);
        let inside = (half_width - d) / step + 0.5;
        (inside > 0.0).then(|| (phi, value * inside.min(1.0)))
    }));
    Ok(direction)
}

/// Circular standard deviation `sqrt(-2 ln R)` of a density.
pub fn circular_std(density: &AngularDensity) -> f64 {
    let (_, resultant) = mean_direction(density.points());
    if resultant <= 0.0 {
        return f64::INFINITY;
    }
    (-2.0 * resultant.ln()).max(0.0).sqrt()
}

/// Lobes of a fractional revival at `tau = 1/k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeSet {
    /// Lobe centres in `[0, 2 pi)`, ascending by lattice index from the
    /// initial packet position.
    pub centers: Vec<f64>,
    pub weights: Vec<f64>,
    pub k: u32,
    /// Probability in dropped lobes.
    pub residual_weight: f64,
}

impl LobeSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Total probability over the full circle, kept and dropped lobes together.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.residual_weight
    }
}

/// Decomposes the state at `tau = 1/k` (no flux) into copies of the initial
/// packet sitting on the lattice `phi0 + 2 pi j / k`.
pub fn fractional_lobes(psi0: &StateVector, k: u32) -> Result<LobeSet> {
    fractional_lobes_with(psi0, k, &PeakThresholds::default())
}

pub fn fractional_lobes_with(
    psi0: &StateVector,
    k: u32,
    thresholds: &PeakThresholds,
) -> Result<LobeSet> {
    if !(2..=MAX_FRACTION).contains(&k) {
        return Err(Error::invalid(
            "k",
            format!("fraction denominator must be in 2..={MAX_FRACTION}, got {k}"),
        ));
    }
    let grid_size = psi0.default_grid_size();
    let initial = position_density(psi0, grid_size)?;
    let spacing = TAU / k as f64;
    let width = circular_std(&initial);
    if width >= 0.5 * spacing {
        return Err(Error::Overlap { width, spacing });
    }
    let phi0 = peak_angle_with(&initial, thresholds)?;

    let density = position_density(&evolve(psi0, 1.0 / k as f64, 0.0), grid_size)?;
    let mut arc_mass = vec![0.0; k as usize];
    for (phi, value) in density.points() {
        let j = (wrap_angle(phi - phi0) / spacing + 0.5).floor() as usize % k as usize;
        arc_mass[j] += value;
    }
    let step = density.step();
    let mut lobes = LobeSet {
        centers: Vec::new(),
        weights: Vec::new(),
        k,
        residual_weight: 0.0,
    };
    for (j, mass) in arc_mass.into_iter().enumerate() {
        let weight = mass * step;
        if weight < thresholds.min_lobe_weight {
            lobes.residual_weight += weight;
        } else {
            lobes.centers.push(wrap_angle(phi0 + spacing * j as f64));
            lobes.weights.push(weight);
        }
    }
    Ok(lobes)
}
