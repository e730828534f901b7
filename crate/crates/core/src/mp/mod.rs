//! Movement-primitive core: basis systems, weight fitting, weight and
//! trajectory distributions, and the DMP integrator.

mod basis;
mod config;
mod distribution;
mod dmp;
mod grid;
mod weights;

pub use basis::{build_basis, build_phase, compose_mean, BasisKind, BasisSystem, WeightVector, INTEGRATION_REFINEMENT};
pub use config::DmpConfig;
pub use distribution::{
    marginal_std, sample_trajectories, sample_weights, trajectory_distribution, TrajectoryDistribution,
};
pub use dmp::integrate_dmp;
pub use grid::{InitialState, TimeGrid, Trajectory};
pub use weights::{
    fit_weight_distribution, fit_weight_distribution_default, fit_weights, WeightDistribution,
    DEFAULT_OBSERVATION_NOISE, DEFAULT_RELATIVE_REGULARIZER, DEFAULT_RIDGE,
};
