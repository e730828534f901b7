use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{BasisSystem, WeightVector};
use super::grid::{InitialState, Trajectory};
use crate::error::{Error, Result};
use crate::linalg;

pub const DEFAULT_RIDGE: f64 = 1e-9;
pub const DEFAULT_OBSERVATION_NOISE: f64 = 1e-6;
/// Relative covariance regularizer: `eps_reg = 1e-8 · trace(Σ) / dim`.
pub const DEFAULT_RELATIVE_REGULARIZER: f64 = 1e-8;

/// Singular-value ratio below which an unregularized fit is refused.
const RANK_TOL: f64 = 1e-12;

/// Ridge regression of a trajectory onto the basis, one dimension at a time.
///
/// Solves `min ‖y_d - xi1 y_b - xi2 ẏ_b - phi ω_d‖² + ridge ‖ω_d‖²` through an
/// SVD of the augmented design matrix `[phi; √ridge I]`.
pub fn fit_weights(
    traj: &Trajectory,
    basis: &BasisSystem,
    init: &InitialState,
    ridge: f64,
) -> Result<WeightVector> {
    if !traj.grid().same_as(basis.grid()) {
        return Err(Error::Shape(format!(
            "trajectory grid ({} steps over {}s) differs from basis grid ({} steps over {}s)",
            traj.n_steps(),
            traj.grid().duration(),
            basis.grid().n_steps(),
            basis.grid().duration()
        )));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Config(format!("ridge factor must be >= 0, got {ridge}")));
    }
    let n_dims = traj.n_dims();
    init.validate(n_dims)?;

    let phi = basis.phi();
    let (n, w) = (phi.nrows(), phi.ncols());
    let mut design = DMatrix::zeros(n + w, w);
    design.view_mut((0, 0), (n, w)).copy_from(phi);
    let sqrt_ridge = ridge.sqrt();
    for i in 0..w {
        design[(n + i, i)] = sqrt_ridge;
    }
    let svd = design.svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    if ridge == 0.0 && s_min <= RANK_TOL * s_max {
        return Err(Error::IllConditioned(format!(
            "singular value ratio {:e}",
            s_min / s_max
        )));
    }

    let mut omega = DVector::zeros(n_dims * w);
    let mut rhs = DVector::zeros(n + w);
    for d in 0..n_dims {
        for t in 0..n {
            rhs[t] = traj.values()[(t, d)] - basis.homogeneous(t, init, d);
        }
        let sol = svd
            .solve(&rhs, RANK_TOL * s_max)
            .map_err(|e| Error::Numeric(format!("least-squares solve failed: {e}")))?;
        omega.rows_mut(d * w, w).copy_from(&sol);
    }
    Ok(WeightVector::new(omega))
}

/// Gaussian over stacked weight vectors, plus the observation noise used when
/// mapping to trajectory space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    mu_omega: DVector<f64>,
    sigma_omega: DMatrix<f64>,
    n_dims: usize,
    sigma_n_sq: f64,
}

impl WeightDistribution {
    pub fn new(
        mu_omega: DVector<f64>,
        sigma_omega: DMatrix<f64>,
        n_dims: usize,
        sigma_n_sq: f64,
    ) -> Result<Self> {
        if sigma_omega.nrows() != mu_omega.len() {
            return Err(Error::Shape(format!(
                "mean has {} entries but covariance is {}x{}",
                mu_omega.len(),
                sigma_omega.nrows(),
                sigma_omega.ncols()
            )));
        }
        if n_dims == 0 || !mu_omega.len().is_multiple_of(n_dims) {
            return Err(Error::Shape(format!(
                "{} weights cannot be split into {n_dims} dimensions",
                mu_omega.len()
            )));
        }
        if !(sigma_n_sq >= 0.0 && sigma_n_sq.is_finite()) {
            return Err(Error::Config(format!("observation noise must be >= 0, got {sigma_n_sq}")));
        }
        if !linalg::is_finite_vec(&mu_omega) {
            return Err(Error::Invariant("weight mean is not finite".into()));
        }
        linalg::check_psd(&sigma_omega, "weight covariance")?;
        Ok(Self {
            mu_omega,
            sigma_omega,
            n_dims,
            sigma_n_sq,
        })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mu_omega
    }

    pub fn mean_weights(&self) -> WeightVector {
        WeightVector::new(self.mu_omega.clone())
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma_omega
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn weights_per_dim(&self) -> usize {
        self.mu_omega.len() / self.n_dims
    }

    pub fn observation_noise(&self) -> f64 {
        self.sigma_n_sq
    }

    pub fn with_observation_noise(mut self, sigma_n_sq: f64) -> Result<Self> {
        if !(sigma_n_sq >= 0.0 && sigma_n_sq.is_finite()) {
            return Err(Error::Config(format!("observation noise must be >= 0, got {sigma_n_sq}")));
        }
        self.sigma_n_sq = sigma_n_sq;
        Ok(self)
    }

    /// Marginal over a contiguous range of dimensions.
    pub fn marginal_dims(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.n_dims {
            return Err(Error::Shape(format!(
                "dimensions {start}..{} out of range for {}",
                start + len,
                self.n_dims
            )));
        }
        let w = self.weights_per_dim();
        Self::new(
            self.mu_omega.rows(start * w, len * w).into_owned(),
            self.sigma_omega.view((start * w, start * w), (len * w, len * w)).into_owned(),
            len,
            self.sigma_n_sq,
        )
    }
}

/// Sample mean and unbiased sample covariance of demonstration weights, with
/// `eps_reg · I` added to the covariance.
pub fn fit_weight_distribution(weights: &[WeightVector], eps_reg: f64, n_dims: usize) -> Result<WeightDistribution> {
    let (mu, sigma) = sample_moments(weights)?;
    if !(eps_reg >= 0.0 && eps_reg.is_finite()) {
        return Err(Error::Config(format!("eps_reg must be >= 0, got {eps_reg}")));
    }
    let dim = mu.len();
    let sigma = linalg::symmetrize(&sigma) + DMatrix::identity(dim, dim) * eps_reg;
    WeightDistribution::new(mu, sigma, n_dims, DEFAULT_OBSERVATION_NOISE)
}

/// [`fit_weight_distribution`] with the relative default regularizer.
pub fn fit_weight_distribution_default(weights: &[WeightVector], n_dims: usize) -> Result<WeightDistribution> {
    let (_, sigma) = sample_moments(weights)?;
    let eps = DEFAULT_RELATIVE_REGULARIZER * sigma.trace() / sigma.nrows() as f64;
    fit_weight_distribution(weights, eps, n_dims)
}

fn sample_moments(weights: &[WeightVector]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if weights.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 weight vectors, got {}",
            weights.len()
        )));
    }
    let dim = weights[0].len();
    if dim == 0 || weights.iter().any(|w| w.len() != dim) {
        return Err(Error::Shape("weight vectors differ in length".into()));
    }
    let n = weights.len() as f64;
    let mut mu = DVector::zeros(dim);
    for w in weights {
        mu += w.as_vector();
    }
    mu /= n;
    let mut sigma = DMatrix::zeros(dim, dim);
    for w in weights {
        let c = w.as_vector() - &mu;
        sigma.ger(1.0, &c, &c, 1.0);
    }
    sigma /= n - 1.0;
    Ok((mu, sigma))
}
