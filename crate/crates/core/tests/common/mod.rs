#![allow(dead_code)]

use faprodmp::mp::{build_basis, BasisKind, BasisSystem, DmpConfig, TimeGrid, WeightDistribution};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(lo..hi))
}

/// Random symmetric positive definite matrix `A Aᵀ / n + floor·I`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, scale: f64, floor: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0) * scale);
    let mut m = &a * a.transpose() / n as f64;
    for i in 0..n {
        m[(i, i)] += floor;
    }
    (&m + m.transpose()) * 0.5
}

pub fn basis(n_basis: usize, duration: f64, n_steps: usize, kind: BasisKind) -> BasisSystem {
    let cfg = DmpConfig::for_duration(duration).with_basis(n_basis);
    build_basis(&cfg, &TimeGrid::new(duration, n_steps).unwrap(), kind).unwrap()
}

pub fn random_distribution(rng: &mut ChaCha8Rng, n_dims: usize, w: usize, noise: f64) -> WeightDistribution {
    let dim = n_dims * w;
    WeightDistribution::new(uniform_vec(rng, dim, -2.0, 2.0), random_spd(rng, dim, 1.0, 0.05), n_dims, noise).unwrap()
}

pub fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
