use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::basis::{BasisSystem, WeightVector};
use super::grid::{InitialState, TimeGrid, Trajectory};
use super::weights::WeightDistribution;
use crate::error::{Error, Result};
use crate::linalg;

/// Gaussian over a whole multi-dimensional trajectory.
///
/// Entries are stacked dimension-major: index `d · n_steps + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDistribution {
    grid: TimeGrid,
    mu_lambda: DVector<f64>,
    sigma_lambda: DMatrix<f64>,
    n_dims: usize,
}

impl TrajectoryDistribution {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mu_lambda
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma_lambda
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn index(&self, step: usize, dim: usize) -> usize {
        dim * self.grid.n_steps() + step
    }

    pub fn mean_trajectory(&self) -> Trajectory {
        let n = self.grid.n_steps();
        let values = DMatrix::from_fn(n, self.n_dims, |t, d| self.mu_lambda[d * n + t]);
        Trajectory::new(self.grid, values).expect("mean is finite by construction")
    }

    /// Per-step standard deviation of every dimension.
    pub fn std_trajectory(&self) -> DMatrix<f64> {
        let n = self.grid.n_steps();
        DMatrix::from_fn(n, self.n_dims, |t, d| {
            let i = d * n + t;
            self.sigma_lambda[(i, i)].max(0.0).sqrt()
        })
    }
}

/// Maps a weight distribution to trajectory space:
/// `μ_Λ = ξ1 y_b + ξ2 ẏ_b + Hᵀ μ_ω`, `Σ_Λ = Hᵀ Σ_ω H + σ_n² I`.
pub fn trajectory_distribution(
    wd: &WeightDistribution,
    basis: &BasisSystem,
    init: &InitialState,
) -> Result<TrajectoryDistribution> {
    check_compatible(wd, basis)?;
    linalg::check_psd(wd.covariance(), "weight covariance")?;
    let n_dims = wd.n_dims();
    let mean = basis.compose(&wd.mean_weights(), init)?;
    let n = basis.grid().n_steps();
    let mu_lambda = DVector::from_fn(n * n_dims, |i, _| mean.values()[(i % n, i / n)]);

    let h = basis.block_matrix(n_dims);
    let mut sigma = h.transpose() * wd.covariance() * &h;
    for i in 0..sigma.nrows() {
        sigma[(i, i)] += wd.observation_noise();
    }
    let sigma_lambda = linalg::symmetrize(&sigma);
    Ok(TrajectoryDistribution {
        grid: *basis.grid(),
        mu_lambda,
        sigma_lambda,
        n_dims,
    })
}

/// Per-step marginal standard deviation without forming the full `Σ_Λ`.
pub fn marginal_std(wd: &WeightDistribution, basis: &BasisSystem) -> Result<DMatrix<f64>> {
    check_compatible(wd, basis)?;
    let w = basis.weights_per_dim();
    let phi = basis.phi();
    let n = phi.nrows();
    let mut out = DMatrix::zeros(n, wd.n_dims());
    for d in 0..wd.n_dims() {
        let block = wd.covariance().view((d * w, d * w), (w, w));
        let tmp = phi * block;
        for t in 0..n {
            let var = tmp.row(t).dot(&phi.row(t)) + wd.observation_noise();
            out[(t, d)] = var.max(0.0).sqrt();
        }
    }
    Ok(out)
}

/// Draws `n` weight vectors `ω ~ N(μ_ω, Σ_ω)` and composes each one.
/// Deterministic for a given seed.
pub fn sample_trajectories(
    wd: &WeightDistribution,
    basis: &BasisSystem,
    init: &InitialState,
    n: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    sample_weights(wd, n, seed)?
        .iter()
        .map(|omega| basis.compose(omega, init))
        .collect()
}

/// Draws `n` weight vectors through a jittered Cholesky factor of `Σ_ω`.
pub fn sample_weights(wd: &WeightDistribution, n: usize, seed: u64) -> Result<Vec<WeightVector>> {
    if n == 0 {
        return Err(Error::Config("sample count must be >= 1".into()));
    }
    let l = linalg::robust_cholesky(wd.covariance())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = wd.mean().len();
    Ok((0..n)
        .map(|_| {
            let z = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
            WeightVector::new(wd.mean() + &l * z)
        })
        .collect())
}

fn check_compatible(wd: &WeightDistribution, basis: &BasisSystem) -> Result<()> {
    if wd.weights_per_dim() != basis.weights_per_dim() {
        return Err(Error::Shape(format!(
            "distribution has {} weights per dimension, basis has {}",
            wd.weights_per_dim(),
            basis.weights_per_dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{build_basis, BasisKind, DmpConfig};

    fn basis() -> BasisSystem {
        let cfg = DmpConfig::for_duration(1.0).with_basis(4);
        build_basis(&cfg, &TimeGrid::new(1.0, 20).unwrap(), BasisKind::ProDmp).unwrap()
    }

    #[test]
    fn zero_covariance_gives_noise_only() {
        let b = basis();
        let wd = WeightDistribution::new(DVector::from_element(10, 0.3), DMatrix::zeros(10, 10), 2, 0.25).unwrap();
        let td = trajectory_distribution(&wd, &b, &InitialState::zeros(2)).unwrap();
        assert!((td.covariance() - DMatrix::identity(40, 40) * 0.25).amax() < 1e-15);
    }

    #[test]
    fn zero_init_mean_is_h_transpose_mu() {
        let b = basis();
        let mu = DVector::from_fn(10, |i, _| i as f64 - 4.0);
        let wd = WeightDistribution::new(mu.clone(), DMatrix::identity(10, 10), 2, 0.0).unwrap();
        let td = trajectory_distribution(&wd, &b, &InitialState::zeros(2)).unwrap();
        let direct = b.block_matrix(2).transpose() * mu;
        assert_eq!(td.mean(), &direct);
    }

    #[test]
    fn zero_covariance_samples_equal_mean() {
        let b = basis();
        let wd = WeightDistribution::new(DVector::from_element(5, 0.3), DMatrix::zeros(5, 5), 1, 0.0).unwrap();
        let init = InitialState::zeros(1);
        let mean = b.compose(&wd.mean_weights(), &init).unwrap();
        for s in sample_trajectories(&wd, &b, &init, 3, 9).unwrap() {
            assert_eq!(s, mean);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let b = basis();
        let wd = WeightDistribution::new(DVector::zeros(5), DMatrix::identity(5, 5), 1, 0.0).unwrap();
        let init = InitialState::zeros(1);
        let a = sample_trajectories(&wd, &b, &init, 4, 42).unwrap();
        let c = sample_trajectories(&wd, &b, &init, 4, 42).unwrap();
        assert_eq!(a, c);
        let d = sample_trajectories(&wd, &b, &init, 4, 43).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn marginal_std_matches_full_diagonal() {
        let b = basis();
        let a = DMatrix::from_fn(10, 10, |i, j| ((i * 3 + j * 7) % 5) as f64 - 2.0);
        let wd = WeightDistribution::new(DVector::zeros(10), &a * a.transpose(), 2, 1e-3).unwrap();
        let td = trajectory_distribution(&wd, &b, &InitialState::zeros(2)).unwrap();
        let m = marginal_std(&wd, &b).unwrap();
        assert!((td.std_trajectory() - m).amax() < 1e-9);
    }
}
