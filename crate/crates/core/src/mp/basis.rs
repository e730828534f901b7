//! Basis systems for ProDMP and ProMP.
//!
//! A ProDMP trajectory of one dimension is
//! `y(t) = xi1(t) y_b + xi2(t) ẏ_b + phi(t) · [w, g]`,
//! where every column of `phi` is the zero-start response of the linear
//! attractor system to one basis forcing term (or to a unit goal), and
//! `xi1`/`xi2` are its unforced responses to a unit start position/velocity.
//! The columns are integrated numerically with RK4 on a 10x refined grid,
//! relying on superposition instead of the closed-form solution.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::config::DmpConfig;
use super::grid::{InitialState, TimeGrid, Trajectory};
use crate::error::{Error, Result};

/// Refinement of the integration grid relative to the output grid.
pub const INTEGRATION_REFINEMENT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    ProDmp,
    ProMp,
}

/// Phase value `x(t) = exp(-alpha_x t / tau)` at every grid step.
pub fn build_phase(cfg: &DmpConfig, grid: &TimeGrid) -> Result<DVector<f64>> {
    cfg.validate()?;
    Ok(DVector::from_iterator(
        grid.n_steps(),
        grid.times().map(|t| phase_at(cfg, t)),
    ))
}

pub(crate) fn phase_at(cfg: &DmpConfig, t: f64) -> f64 {
    (-cfg.alpha_x * t / cfg.tau).exp()
}

/// Gaussian activations with centers equally spaced over `[0, tau]` in
/// phase-time.
#[derive(Debug, Clone)]
pub(crate) struct GaussianBasis {
    centers: Vec<f64>,
    inv_two_var: f64,
}

impl GaussianBasis {
    pub(crate) fn new(cfg: &DmpConfig) -> Self {
        let n = cfg.n_basis;
        let spacing = cfg.tau / (n - 1) as f64;
        let centers = (0..n).map(|i| i as f64 * spacing).collect();
        // exp(-spacing² / (2 var)) == basis_width
        let var = spacing * spacing / (2.0 * (1.0 / cfg.basis_width).ln());
        Self {
            centers,
            inv_two_var: 1.0 / (2.0 * var),
        }
    }

    /// Normalized activations at phase-time `t`.
    pub(crate) fn normalized(&self, t: f64, out: &mut [f64]) {
        let mut sum = 0.0;
        for (o, c) in out.iter_mut().zip(&self.centers) {
            let d = t - c;
            *o = (-d * d * self.inv_two_var).exp();
            sum += *o;
        }
        if sum > 0.0 {
            out.iter_mut().for_each(|o| *o /= sum);
        } else {
            // Far outside all centers: fall back to the nearest basis.
            let nearest = if t < 0.0 { 0 } else { out.len() - 1 };
            out.iter_mut().for_each(|o| *o = 0.0);
            out[nearest] = 1.0;
        }
    }
}

/// Per-timestep basis values and initial-condition coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSystem {
    grid: TimeGrid,
    kind: BasisKind,
    /// `n_steps × (n_basis + 1)`; the last column is the goal.
    phi: DMatrix<f64>,
    dphi: DMatrix<f64>,
    xi1: DVector<f64>,
    xi2: DVector<f64>,
    dxi1: DVector<f64>,
    dxi2: DVector<f64>,
    anchor: usize,
}

/// Forcing applied to the attractor system during basis integration.
#[derive(Clone, Copy)]
enum Forcing {
    None,
    Basis(usize),
}

pub fn build_basis(cfg: &DmpConfig, grid: &TimeGrid, kind: BasisKind) -> Result<BasisSystem> {
    cfg.validate()?;
    match kind {
        BasisKind::ProDmp => build_prodmp(cfg, grid),
        BasisKind::ProMp => Ok(build_promp(cfg, grid)),
    }
}

fn build_promp(cfg: &DmpConfig, grid: &TimeGrid) -> BasisSystem {
    let n = grid.n_steps();
    let nb = cfg.n_basis;
    let gauss = GaussianBasis::new(cfg);
    let mut phi = DMatrix::zeros(n, nb + 1);
    let mut act = vec![0.0; nb];
    for (k, t) in grid.times().enumerate() {
        gauss.normalized(t, &mut act);
        for (i, a) in act.iter().enumerate() {
            phi[(k, i)] = *a;
        }
        phi[(k, nb)] = 1.0;
    }
    let dphi = finite_difference(&phi, grid.dt());
    BasisSystem {
        grid: *grid,
        kind: BasisKind::ProMp,
        phi,
        dphi,
        xi1: DVector::zeros(n),
        xi2: DVector::zeros(n),
        dxi1: DVector::zeros(n),
        dxi2: DVector::zeros(n),
        anchor: 0,
    }
}

fn finite_difference(m: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, m.ncols(), |t, c| {
        if t == 0 {
            (m[(1, c)] - m[(0, c)]) / dt
        } else if t + 1 == n {
            (m[(n - 1, c)] - m[(n - 2, c)]) / dt
        } else {
            (m[(t + 1, c)] - m[(t - 1, c)]) / (2.0 * dt)
        }
    })
}

fn build_prodmp(cfg: &DmpConfig, grid: &TimeGrid) -> Result<BasisSystem> {
    let n = grid.n_steps();
    let nb = cfg.n_basis;
    let gauss = GaussianBasis::new(cfg);
    let mut phi = DMatrix::zeros(n, nb + 1);
    let mut dphi = DMatrix::zeros(n, nb + 1);

    for i in 0..nb {
        let (y, v) = integrate_response(cfg, &gauss, grid, 0.0, 0.0, 0.0, Forcing::Basis(i));
        store_column(&mut phi, &mut dphi, i, &y, &v, &format!("basis {i}"))?;
    }
    let (y, v) = integrate_response(cfg, &gauss, grid, 0.0, 0.0, 1.0, Forcing::None);
    store_column(&mut phi, &mut dphi, nb, &y, &v, "goal")?;

    let (xi1, dxi1) = integrate_response(cfg, &gauss, grid, 1.0, 0.0, 0.0, Forcing::None);
    let (xi2, dxi2) = integrate_response(cfg, &gauss, grid, 0.0, 1.0, 0.0, Forcing::None);
    for (name, col) in [("xi1", &xi1), ("xi2", &xi2), ("dxi1", &dxi1), ("dxi2", &dxi2)] {
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("basis column {name} is not finite")));
        }
    }

    Ok(BasisSystem {
        grid: *grid,
        kind: BasisKind::ProDmp,
        phi,
        dphi,
        xi1: DVector::from_vec(xi1),
        xi2: DVector::from_vec(xi2),
        dxi1: DVector::from_vec(dxi1),
        dxi2: DVector::from_vec(dxi2),
        anchor: 0,
    })
}

fn store_column(
    phi: &mut DMatrix<f64>,
    dphi: &mut DMatrix<f64>,
    col: usize,
    y: &[f64],
    v: &[f64],
    name: &str,
) -> Result<()> {
    if y.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(Error::Numeric(format!("basis column {name} is not finite")));
    }
    for (k, (yk, vk)) in y.iter().zip(v).enumerate() {
        phi[(k, col)] = *yk;
        dphi[(k, col)] = *vk;
    }
    Ok(())
}

/// Forcing term `f(t) = x(t) * psi_i(t) / sum psi(t)`.
fn forcing_value(cfg: &DmpConfig, gauss: &GaussianBasis, forcing: Forcing, t: f64, buf: &mut [f64]) -> f64 {
    match forcing {
        Forcing::None => 0.0,
        Forcing::Basis(i) => {
            gauss.normalized(t, buf);
            phase_at(cfg, t) * buf[i]
        }
    }
}

/// Integrates the linear attractor system and samples position/velocity on
/// the output grid.
fn integrate_response(
    cfg: &DmpConfig,
    gauss: &GaussianBasis,
    grid: &TimeGrid,
    y0: f64,
    v0: f64,
    goal: f64,
    forcing: Forcing,
) -> (Vec<f64>, Vec<f64>) {
    let fine = grid.refined(INTEGRATION_REFINEMENT);
    let h = fine.dt();
    let tau2 = cfg.tau * cfg.tau;
    let mut buf = vec![0.0; cfg.n_basis];
    let mut accel = |t: f64, y: f64, v: f64| {
        let f = forcing_value(cfg, gauss, forcing, t, &mut buf);
        (cfg.alpha * (cfg.beta * (goal - y) - cfg.tau * v) + f) / tau2
    };

    let mut ys = Vec::with_capacity(grid.n_steps());
    let mut vs = Vec::with_capacity(grid.n_steps());
    let (mut y, mut v) = (y0, v0);
    ys.push(y);
    vs.push(v);
    for j in 0..fine.n_steps() - 1 {
        let t = j as f64 * h;
        let k1y = v;
        let k1v = accel(t, y, v);
        let k2y = v + 0.5 * h * k1v;
        let k2v = accel(t + 0.5 * h, y + 0.5 * h * k1y, k2y);
        let k3y = v + 0.5 * h * k2v;
        let k3v = accel(t + 0.5 * h, y + 0.5 * h * k2y, k3y);
        let k4y = v + h * k3v;
        let k4v = accel(t + h, y + h * k3y, k4y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (j + 1) % INTEGRATION_REFINEMENT == 0 {
            ys.push(y);
            vs.push(v);
        }
    }
    (ys, vs)
}

impl BasisSystem {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// Time derivative of every basis column.
    pub fn dphi(&self) -> &DMatrix<f64> {
        &self.dphi
    }

    pub fn xi1(&self) -> &DVector<f64> {
        &self.xi1
    }

    pub fn xi2(&self) -> &DVector<f64> {
        &self.xi2
    }

    /// Step at which the initial state applies (0 unless re-anchored).
    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn weights_per_dim(&self) -> usize {
        self.phi.ncols()
    }

    /// Basis restarted at `step`: a trajectory composed from it starts at the
    /// initial state given for time `t[step]` and keeps the forcing phase of the
    /// original movement. Rows before `step` hold the initial state.
    ///
    /// ProMP bases have no initial-condition terms and are returned unchanged.
    pub fn anchored_at(&self, step: usize) -> Result<BasisSystem> {
        if step >= self.grid.n_steps() {
            return Err(Error::Shape(format!(
                "anchor step {step} outside grid of {} steps",
                self.grid.n_steps()
            )));
        }
        if self.kind == BasisKind::ProMp || step == self.anchor {
            return Ok(self.clone());
        }
        if self.anchor != 0 {
            return Err(Error::Precondition(
                "re-anchoring is defined relative to the unanchored basis".into(),
            ));
        }
        let n = self.grid.n_steps();
        let cols = self.phi.ncols();
        let p_b = self.phi.row(step).into_owned();
        let dp_b = self.dphi.row(step).into_owned();
        let mut phi = DMatrix::zeros(n, cols);
        let mut dphi = DMatrix::zeros(n, cols);
        let mut xi1 = DVector::zeros(n);
        let mut xi2 = DVector::zeros(n);
        let mut dxi1 = DVector::zeros(n);
        let mut dxi2 = DVector::zeros(n);
        for k in 0..n {
            if k < step {
                xi1[k] = 1.0;
                continue;
            }
            let s = k - step;
            // The homogeneous system is time invariant, so its responses shift.
            xi1[k] = self.xi1[s];
            xi2[k] = self.xi2[s];
            dxi1[k] = self.dxi1[s];
            dxi2[k] = self.dxi2[s];
            let row = self.phi.row(k) - &p_b * self.xi1[s] - &dp_b * self.xi2[s];
            let drow = self.dphi.row(k) - &p_b * self.dxi1[s] - &dp_b * self.dxi2[s];
            phi.set_row(k, &row);
            dphi.set_row(k, &drow);
        }
        Ok(BasisSystem {
            grid: self.grid,
            kind: self.kind,
            phi,
            dphi,
            xi1,
            xi2,
            dxi1,
            dxi2,
            anchor: step,
        })
    }

    /// Homogeneous (initial-state) contribution for dimension `dim` at `step`.
    pub fn homogeneous(&self, step: usize, init: &InitialState, dim: usize) -> f64 {
        self.xi1[step] * init.position[dim] + self.xi2[step] * init.velocity[dim]
    }

    /// Block-diagonal expansion `H` of shape `(n_dims·W) × (n_dims·n_steps)`,
    /// so that the stacked trajectory is `Hᵀ ω` plus homogeneous terms.
    /// Trajectory entries are ordered dimension-major: index `d·n_steps + t`.
    pub fn block_matrix(&self, n_dims: usize) -> DMatrix<f64> {
        let (n, w) = (self.phi.nrows(), self.phi.ncols());
        let mut h = DMatrix::zeros(n_dims * w, n_dims * n);
        let phi_t = self.phi.transpose();
        for d in 0..n_dims {
            h.view_mut((d * w, d * n), (w, n)).copy_from(&phi_t);
        }
        h
    }

    /// Observation matrix `H'_t` at `step` for the dimensions in `dims`:
    /// shape `(n_dims·W) × dims.len()`, non-zero only in each selected
    /// dimension's own weight block.
    pub fn observation_matrix(&self, step: usize, n_dims: usize, dims: &[usize]) -> DMatrix<f64> {
        let w = self.phi.ncols();
        let mut h = DMatrix::zeros(n_dims * w, dims.len());
        for (j, &d) in dims.iter().enumerate() {
            for i in 0..w {
                h[(d * w + i, j)] = self.phi[(step, i)];
            }
        }
        h
    }

    /// Mean trajectory for weights `omega` from `init`.
    pub fn compose(&self, omega: &WeightVector, init: &InitialState) -> Result<Trajectory> {
        let w = self.weights_per_dim();
        if !omega.len().is_multiple_of(w) || omega.is_empty() {
            return Err(Error::Shape(format!(
                "weight vector of length {} is not a multiple of {w}",
                omega.len()
            )));
        }
        let n_dims = omega.len() / w;
        init.validate(n_dims)?;
        let mut values = DMatrix::zeros(self.grid.n_steps(), n_dims);
        for d in 0..n_dims {
            let col = &self.phi * omega.block(d, w);
            for t in 0..self.grid.n_steps() {
                values[(t, d)] = col[t] + self.homogeneous(t, init, d);
            }
        }
        Trajectory::new(self.grid, values)
    }

    /// Velocity of the composed trajectory at every step.
    pub fn compose_velocity(&self, omega: &WeightVector, init: &InitialState) -> Result<DMatrix<f64>> {
        let w = self.weights_per_dim();
        let n_dims = omega.len() / w;
        init.validate(n_dims)?;
        let mut values = DMatrix::zeros(self.grid.n_steps(), n_dims);
        for d in 0..n_dims {
            let col = &self.dphi * omega.block(d, w);
            for t in 0..self.grid.n_steps() {
                values[(t, d)] = col[t]
                    + self.dxi1[t] * init.position[d]
                    + self.dxi2[t] * init.velocity[d];
            }
        }
        Ok(values)
    }
}

/// Stacked per-dimension weights `[w_0.., g | w_0.., g | ...]` (dimension-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub DVector<f64>);

impl WeightVector {
    pub fn new(omega: DVector<f64>) -> Self {
        Self(omega)
    }

    pub fn zeros(n_dims: usize, weights_per_dim: usize) -> Self {
        Self(DVector::zeros(n_dims * weights_per_dim))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weights of dimension `dim` when each block holds `w` entries.
    pub fn block(&self, dim: usize, w: usize) -> nalgebra::DVectorView<'_, f64> {
        self.0.rows(dim * w, w)
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Free-function form of [`BasisSystem::compose`].
pub fn compose_mean(basis: &BasisSystem, omega: &WeightVector, init: &InitialState) -> Result<Trajectory> {
    basis.compose(omega, init)
}
