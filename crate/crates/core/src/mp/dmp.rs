//! Direct integration of the DMP attractor system.
//!
//! This is an independent route to the same trajectories the ProDMP basis
//! produces by superposition; the two must agree.

use nalgebra::DMatrix;

use super::basis::{phase_at, GaussianBasis, WeightVector, INTEGRATION_REFINEMENT};
use super::config::DmpConfig;
use super::grid::{InitialState, TimeGrid, Trajectory};
use crate::error::{Error, Result};

/// Integrates `tau² ÿ = alpha (beta (g - y) - tau ẏ) + x Σψ_i w_i / Σψ_i`
/// with fixed-step RK4 on a 10x refined grid, for every dimension.
///
/// `omega` uses the usual per-dimension `[w_0 .. w_{n-1}, g]` layout.
pub fn integrate_dmp(
    cfg: &DmpConfig,
    omega: &WeightVector,
    init: &InitialState,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    cfg.validate()?;
    let w = cfg.weights_per_dim();
    if omega.is_empty() || !omega.len().is_multiple_of(w) {
        return Err(Error::Shape(format!(
            "weight vector of length {} is not a multiple of {w}",
            omega.len()
        )));
    }
    let n_dims = omega.len() / w;
    init.validate(n_dims)?;

    let gauss = GaussianBasis::new(cfg);
    let fine = grid.refined(INTEGRATION_REFINEMENT);
    let h = fine.dt();
    let tau = cfg.tau;
    let mut act = vec![0.0; cfg.n_basis];
    let mut values = DMatrix::zeros(grid.n_steps(), n_dims);

    for d in 0..n_dims {
        let block = omega.block(d, w);
        let weights: Vec<f64> = block.rows(0, cfg.n_basis).iter().copied().collect();
        let goal = block[cfg.n_basis];
        let mut accel = |t: f64, y: f64, v: f64| {
            gauss.normalized(t, &mut act);
            let f = phase_at(cfg, t) * act.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>();
            (cfg.alpha * (cfg.beta * (goal - y) - tau * v) + f) / (tau * tau)
        };
        let (mut y, mut v) = (init.position[d], init.velocity[d]);
        values[(0, d)] = y;
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
            if !(y.is_finite() && v.is_finite()) {
                return Err(Error::Numeric(format!(
                    "DMP state of dimension {d} diverged at t={:.4}s",
                    t + h
                )));
            }
            if (j + 1) % INTEGRATION_REFINEMENT == 0 {
                values[((j + 1) / INTEGRATION_REFINEMENT, d)] = y;
            }
        }
    }
    Trajectory::new(*grid, values)
}
