//! Real-space reference engine.
//!
//! Solves `i dPsi/dtau = 2 pi (-i d/dphi + alpha)^2 Psi` on a periodic grid
//! of `M` points with fourth-order covariant central differences (Peierls
//! phases `exp(i alpha j h)` on the `j`-site links) and the Cayley, or
//! implicit midpoint, propagator
//!
//! ```text
//! (1 + i dtau H / 2) psi' = (1 - i dtau H / 2) psi
//! ```
//!
//! The implicit system is a periodic pentadiagonal matrix. It is solved
//! directly: banded LU of the open-chain part plus a rank-4 Woodbury
//! correction for the wrap-around corners. This module is only used to
//! cross-check [`crate::ring`], never by the estimator.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::ring::{AngularDensity, StateVector};
use crate::{Error, Result};

/// Largest time step inside the documented accuracy envelope.
pub const MAX_DTAU: f64 = 1e-4;

/// Relative residual above which a linear solve counts as failed.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// How often [`CayleyPropagator::propagate`] re-checks the solve residual.
pub const RESIDUAL_CHECK_INTERVAL: usize = 1000;

const MIN_GRID: usize = 8;
const BAND: usize = 2;

/// Wavefunction samples `Psi(phi_k)` at `phi_k = 2 pi k / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    values: Vec<Complex64>,
    tau: f64,
}

impl GridState {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn step_size(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    /// `(2 pi / M) sum |Psi_k|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.step_size()
    }

    pub fn density(&self) -> Result<AngularDensity> {
        AngularDensity::from_values(self.values.iter().map(|v| v.norm_sqr()).collect())
    }

    fn inner(&self, other: &GridState) -> Complex64 {
        assert_eq!(self.grid_size(), other.grid_size(), "grid sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.step_size()
    }

    /// `|<self|other>|^2` on the grid.
    pub fn fidelity(&self, other: &GridState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `sqrt(int |Psi - Phi|^2 dphi)`, sensitive to global phase.
    pub fn l2_distance(&self, other: &GridState) -> f64 {
        assert_eq!(self.grid_size(), other.grid_size(), "grid sizes differ");
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (sum * self.step_size()).sqrt()
    }

    /// Multiplies by `exp(i j phi)`, a gauge transformation on the grid.
    pub fn gauge_shift(&self, j: i64) -> GridState {
        let m = self.grid_size() as i64;
        let roots = roots_of_unity(self.grid_size());
        GridState {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| v * roots[(j * k as i64).rem_euclid(m) as usize])
                .collect(),
            tau: self.tau,
        }
    }
}

fn roots_of_unity(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::cis(TAU * k as f64 / m as f64))
        .collect()
}

/// Pointwise synthesis `Psi(phi_k) = sum_n a_n exp(i n phi_k) / sqrt(2 pi)`.
pub fn from_state_vector(state: &StateVector, grid_size: usize) -> Result<GridState> {
    state.check_grid(grid_size)?;
    let roots = roots_of_unity(grid_size);
    let m = grid_size as i64;
    let scale = 1.0 / TAU.sqrt();
    let values = (0..m)
        .map(|k| {
            state
                .levels()
                .map(|(n, a)| a * roots[(n * k).rem_euclid(m) as usize])
                .sum::<Complex64>()
                * scale
        })
        .collect();
    Ok(GridState { values, tau: 0.0 })
}

/// Periodic pentadiagonal operator with constant coefficients:
/// `(A v)_k = diag v_k + sum_j plus[j-1] v_{k+j} + minus[j-1] v_{k-j}`.
#[derive(Debug, Clone, Copy)]
struct Circulant {
    diag: Complex64,
    plus: [Complex64; BAND],
    minus: [Complex64; BAND],
}

impl Circulant {
    /// The dimensionless Hamiltonian `2 pi (-i D + alpha)^2` with the
    /// fourth-order stencil `(-1/12, 4/3, -5/2, 4/3, -1/12) / h^2` for `D^2`.
    fn hamiltonian(m: usize, alpha: f64) -> Self {
        let h = TAU / m as f64;
        let c = TAU / (h * h);
        let link1 = Complex64::cis(alpha * h);
        let link2 = Complex64::cis(2.0 * alpha * h);
        let plus = [link1 * (-4.0 / 3.0 * c), link2 * (c / 12.0)];
        Circulant {
            diag: Complex64::new(2.5 * c, 0.0),
            plus,
            minus: [plus[0].conj(), plus[1].conj()],
        }
    }

    /// `1 + s H`.
    fn shifted(h: &Circulant, s: Complex64) -> Self {
        Circulant {
            diag: Complex64::new(1.0, 0.0) + s * h.diag,
            plus: h.plus.map(|x| s * x),
            minus: h.minus.map(|x| s * x),
        }
    }

    fn apply(&self, input: &[Complex64], output: &mut [Complex64]) {
        let m = input.len();
        for k in 0..m {
            let mut acc = self.diag * input[k];
            for j in 1..=BAND {
                acc += self.plus[j - 1] * input[(k + j) % m];
                acc += self.minus[j - 1] * input[(k + m - j) % m];
            }
            output[k] = acc;
        }
    }
}

/// In-place LU (no pivoting) of an open-chain band matrix with `BAND`
/// sub- and super-diagonals. Row `r` stores columns `r - BAND ..= r + BAND`.
///
/// Pivoting is unnecessary: every matrix factored here is `1 + iK` with `K`
/// Hermitian, whose leading principal blocks are all nonsingular.
#[derive(Debug, Clone)]
struct BandLu {
    rows: Vec<[Complex64; 2 * BAND + 1]>,
}

impl BandLu {
    fn factor(op: &Circulant, m: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut rows = vec![[zero; 2 * BAND + 1]; m];
        for (r, row) in rows.iter_mut().enumerate() {
            row[BAND] = op.diag;
            for j in 1..=BAND {
                if r + j < m {
                    row[BAND + j] = op.plus[j - 1];
                }
                if r >= j {
                    row[BAND - j] = op.minus[j - 1];
                }
            }
        }
        for i in 0..m {
            let pivot = rows[i][BAND];
            let pivot_row = rows[i];
            for r in i + 1..(i + BAND + 1).min(m) {
                let l = rows[r][i + BAND - r] / pivot;
                rows[r][i + BAND - r] = l;
                for c in i + 1..(i + BAND + 1).min(m) {
                    rows[r][c + BAND - r] -= l * pivot_row[c + BAND - i];
                }
            }
        }
        BandLu { rows }
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, x: &mut [Complex64]) {
        let m = x.len();
        for r in 0..m {
            let mut acc = x[r];
            for c in r.saturating_sub(BAND)..r {
                acc -= self.rows[r][c + BAND - r] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..m).rev() {
            let mut acc = x[r];
            for c in r + 1..(r + BAND + 1).min(m) {
                acc -= self.rows[r][c + BAND - r] * x[c];
            }
            x[r] = acc / self.rows[r][BAND];
        }
    }
}

/// Gaussian elimination with partial pivoting on a 4x4 system.
#[allow(clippy::needless_range_loop)]
fn solve_small(mut a: [[Complex64; 4]; 4], mut b: [Complex64; 4]) -> [Complex64; 4] {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..4 {
            let l = a[r][col] / a[col][col];
            for c in col..4 {
                let v = a[col][c];
                a[r][c] -= l * v;
            }
            let v = b[col];
            b[r] -= l * v;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 4];
    for r in (0..4).rev() {
        let mut acc = b[r];
        for c in r + 1..4 {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    x
}

/// Precomputed Cayley step for fixed `(M, dtau, alpha)`.
#[derive(Debug, Clone)]
pub struct CayleyPropagator {
    grid_size: usize,
    dtau: f64,
    implicit: Circulant,
    explicit: Circulant,
    lu: BandLu,
    /// Rows of the corner correction: `(column, value)` pairs per basis row
    /// `0, 1, M-2, M-1`.
    corners: [Vec<(usize, Complex64)>; 4],
    /// Open-chain solves against the four unit vectors.
    basis_solves: [Vec<Complex64>; 4],
    capacitance: [[Complex64; 4]; 4],
}

impl CayleyPropagator {
    pub fn new(grid_size: usize, dtau: f64, alpha: f64) -> Result<Self> {
        if grid_size < MIN_GRID {
            return Err(Error::Envelope {
                what: "grid_size",
                reason: format!("need at least {MIN_GRID} points, got {grid_size}"),
            });
        }
        if !(dtau.is_finite() && dtau > 0.0 && dtau <= MAX_DTAU) {
            return Err(Error::Envelope {
                what: "dtau",
                reason: format!("must lie in (0, {MAX_DTAU:e}], got {dtau:e}"),
            });
        }
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        let m = grid_size;
        let hamiltonian = Circulant::hamiltonian(m, alpha);
        let half = Complex64::new(0.0, 0.5 * dtau);
        let implicit = Circulant::shifted(&hamiltonian, half);
        let explicit = Circulant::shifted(&hamiltonian, -half);
        let lu = BandLu::factor(&implicit, m);

        let basis_rows = [0, 1, m - 2, m - 1];
        let corners = basis_rows.map(|r| {
            let mut entries = Vec::new();
            for j in 1..=BAND {
                if r + j >= m {
                    entries.push((r + j - m, implicit.plus[j - 1]));
                }
                if r < j {
                    entries.push((r + m - j, implicit.minus[j - 1]));
                }
            }
            entries
        });
        let basis_solves = basis_rows.map(|r| {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[r] = Complex64::new(1.0, 0.0);
            lu.solve_in_place(&mut e);
            e
        });
        let mut capacitance = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in capacitance.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let v: Complex64 = corners[i]
                    .iter()
                    .map(|&(c, a)| a * basis_solves[j][c])
                    .sum();
                *entry = v + if i == j { 1.0 } else { 0.0 };
            }
        }
        Ok(CayleyPropagator {
            grid_size,
            dtau,
            implicit,
            explicit,
            lu,
            corners,
            basis_solves,
            capacitance,
        })
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Solves `implicit * x = rhs` in place.
    fn solve(&self, x: &mut [Complex64]) {
        self.lu.solve_in_place(x);
        let y = [0, 1, 2, 3].map(|i| {
            self.corners[i]
                .iter()
                .map(|&(c, a)| a * x[c])
                .sum::<Complex64>()
        });
        let w = solve_small(self.capacitance, y);
        for (q, wj) in self.basis_solves.iter().zip(w) {
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= qi * wj;
            }
        }
    }

    fn residual(&self, x: &[Complex64], rhs: &[Complex64]) -> f64 {
        let mut ax = vec![Complex64::new(0.0, 0.0); x.len()];
        self.implicit.apply(x, &mut ax);
        let num: f64 = ax.iter().zip(rhs).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = rhs.iter().map(|b| b.norm_sqr()).sum();
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }

    fn check_state(&self, state: &GridState) -> Result<()> {
        if state.grid_size() != self.grid_size {
            return Err(Error::invalid(
                "state",
                format!(
                    "grid of {} points does not match propagator grid of {}",
                    state.grid_size(),
                    self.grid_size
                ),
            ));
        }
        Ok(())
    }

    fn advance(
        &self,
        psi: &mut [Complex64],
        rhs: &mut [Complex64],
        check: bool,
    ) -> Result<()> {
        self.explicit.apply(psi, rhs);
        psi.copy_from_slice(rhs);
        self.solve(psi);
        if check {
            let residual = self.residual(psi, rhs);
            if residual.is_nan() || residual > RESIDUAL_TOLERANCE {
                return Err(Error::SolverResidual {
                    residual,
                    tolerance: RESIDUAL_TOLERANCE,
                });
            }
        }
        Ok(())
    }

    /// One step, with the solve residual checked.
    pub fn step(&self, state: &GridState) -> Result<GridState> {
        self.propagate(state, 1)
    }

    /// `steps` consecutive steps. The residual is checked every
    /// [`RESIDUAL_CHECK_INTERVAL`] steps and on the last one.
    pub fn propagate(&self, state: &GridState, steps: usize) -> Result<GridState> {
        self.check_state(state)?;
        let mut psi = state.values.clone();
        let mut rhs = vec![Complex64::new(0.0, 0.0); psi.len()];
        for s in 0..steps {
            let check = s + 1 == steps || (s + 1) % RESIDUAL_CHECK_INTERVAL == 0;
            self.advance(&mut psi, &mut rhs, check)?;
        }
        Ok(GridState {
            values: psi,
            tau: state.tau + steps as f64 * self.dtau,
        })
    }
}

/// A single Cayley step of size `dtau`.
pub fn step(state: &GridState, dtau: f64, alpha: f64) -> Result<GridState> {
    CayleyPropagator::new(state.grid_size(), dtau, alpha)?.step(state)
}

/// Number of equal steps no larger than `dtau` that cover `tau`.
pub fn step_count(tau: f64, dtau: f64) -> usize {
    let n = (tau / dtau * (1.0 - 1e-12)).ceil();
    n.max(1.0) as usize
}

/// Evolves `state0` to time `tau` on the grid and returns the wavefunction.
///
/// The interval is split into `step_count(tau, dtau)` equal steps.
pub fn evolve_grid_state(
    state0: &StateVector,
    tau: f64,
    alpha: f64,
    grid_size: usize,
    dtau: f64,
) -> Result<GridState> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid(
            "tau",
            format!("must be non-negative, got {tau}"),
        ));
    }
    let initial = from_state_vector(state0, grid_size)?;
    if tau == 0.0 {
        return Ok(initial);
    }
    let steps = step_count(tau, dtau);
    CayleyPropagator::new(grid_size, tau / steps as f64, alpha)?.propagate(&initial, steps)
}

/// Evolves `state0` to time `tau` on the grid and returns `|Psi|^2`.
pub fn evolve_grid(
    state0: &StateVector,
    tau: f64,
    alpha: f64,
    grid_size: usize,
    dtau: f64,
) -> Result<AngularDensity> {
    evolve_grid_state(state0, tau, alpha, grid_size, dtau)?.density()
}

/// L2 distance between the grid engine and exact spectral evolution at `tau`.
pub fn spectral_distance(
    state0: &StateVector,
    tau: f64,
    alpha: f64,
    grid_size: usize,
    dtau: f64,
) -> Result<f64> {
    let grid = evolve_grid_state(state0, tau, alpha, grid_size, dtau)?;
    let exact = from_state_vector(&crate::ring::evolve(state0, tau, alpha), grid_size)?;
    Ok(grid.l2_distance(&exact))
}
