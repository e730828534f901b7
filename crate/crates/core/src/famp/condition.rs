//! Partial conditioning of a weight distribution at one timestep.
//!
//! The observation matrix keeps only the selected dimensions' basis rows, so
//! unselected dimensions move only through their correlation with the
//! selected ones.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mp::{BasisSystem, InitialState, WeightDistribution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditioningSpec {
    /// Conditioning time; snapped to the nearest grid step.
    pub t_cond: f64,
    /// Joint dimension indices to condition on.
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
    /// Observation variance per conditioned dimension.
    pub obs_noise: Vec<f64>,
}

impl ConditioningSpec {
    pub fn new(t_cond: f64, dims: Vec<usize>, values: Vec<f64>, obs_noise: f64) -> Self {
        let obs_noise = vec![obs_noise; dims.len()];
        Self {
            t_cond,
            dims,
            values,
            obs_noise,
        }
    }

    fn validate(&self, n_dims: usize) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Config("conditioning needs at least one dimension".into()));
        }
        if self.values.len() != self.dims.len() || self.obs_noise.len() != self.dims.len() {
            return Err(Error::Shape(format!(
                "{} dims, {} values, {} noise entries",
                self.dims.len(),
                self.values.len(),
                self.obs_noise.len()
            )));
        }
        for (i, d) in self.dims.iter().enumerate() {
            if *d >= n_dims {
                return Err(Error::Config(format!("dimension {d} out of range for {n_dims}")));
            }
            if self.dims[..i].contains(d) {
                return Err(Error::Config(format!("dimension {d} listed twice")));
            }
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("conditioning values must be finite".into()));
        }
        if self.obs_noise.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Config("observation noise must be >= 0".into()));
        }
        Ok(())
    }
}

/// Gaussian posterior over weights given `y* = H'ᵀ ω + homogeneous(init)`
/// at `spec.t_cond` for the dimensions in `spec.dims`.
///
/// `init` supplies the initial-state terms of the basis; for a basis anchored
/// at the current step it is the current state.
pub fn condition(
    wd: &WeightDistribution,
    basis: &BasisSystem,
    spec: &ConditioningSpec,
    init: &InitialState,
) -> Result<WeightDistribution> {
    let n_dims = wd.n_dims();
    spec.validate(n_dims)?;
    init.validate(n_dims)?;
    if basis.weights_per_dim() != wd.weights_per_dim() {
        return Err(Error::Shape("basis and distribution disagree on weights per dimension".into()));
    }
    let step = basis.grid().nearest_step(spec.t_cond);
    let h = basis.observation_matrix(step, n_dims, &spec.dims);
    let sigma = wd.covariance();
    let mu = wd.mean();

    let sigma_h = sigma * &h;
    let mut innovation = h.transpose() * &sigma_h;
    for (j, noise) in spec.obs_noise.iter().enumerate() {
        innovation[(j, j)] += noise;
    }
    let residual = DVector::from_iterator(
        spec.dims.len(),
        spec.dims
            .iter()
            .zip(&spec.values)
            .map(|(&d, &y)| y - basis.homogeneous(step, init, d)),
    ) - h.transpose() * mu;

    let singular = || {
        Error::Numeric(format!(
            "innovation matrix at step {step} is singular; use obs_noise > 0"
        ))
    };
    let scale = innovation.amax();
    if scale <= 0.0 {
        return Err(singular());
    }
    // Kᵀ = S⁻¹ (Σ H')ᵀ
    let gain_t = linalg::solve_spd(&innovation, &sigma_h.transpose()).ok_or_else(singular)?;
    let (lo, hi) = linalg::eigen_range(&innovation);
    if lo <= 1e-14 * hi {
        return Err(singular());
    }
    let gain = gain_t.transpose();

    let mu_post = mu + &gain * residual;
    // Joseph form keeps the posterior symmetric PSD.
    let dim = mu.len();
    let a = DMatrix::identity(dim, dim) - &gain * h.transpose();
    let r = DMatrix::from_diagonal(&DVector::from_column_slice(&spec.obs_noise));
    let sigma_post = linalg::symmetrize(&(&a * sigma * a.transpose() + &gain * r * gain.transpose()));
    WeightDistribution::new(mu_post, sigma_post, n_dims, wd.observation_noise())
}
