//! Fits a weight distribution to jittered demonstrations and reports the
//! trajectory mean, its spread, and a few samples.
//!
//!     cargo run --example trajectory_distribution

use faprodmp::mp::{
    build_basis, fit_weight_distribution_default, fit_weights, marginal_std, sample_trajectories, BasisKind,
    DmpConfig, TimeGrid, Trajectory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> faprodmp::Result<()> {
    let grid = TimeGrid::new(1.0, 101)?;
    let basis = build_basis(&DmpConfig::for_duration(1.0), &grid, BasisKind::ProDmp)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let mut weights = Vec::new();
    for _ in 0..12 {
        let amp = rng.random_range(0.8..1.2);
        let rows: Vec<Vec<f64>> = grid
            .times()
            .map(|t| vec![amp * (std::f64::consts::PI * t).sin(), amp * t * t])
            .collect();
        let demo = Trajectory::from_rows(grid, &rows)?;
        weights.push(fit_weights(&demo, &basis, &demo.initial_state(), 1e-9)?);
    }
    let wd = fit_weight_distribution_default(&weights, 2)?;
    let init = faprodmp::mp::InitialState::zeros(2);
    let mean = basis.compose(&wd.mean_weights(), &init)?;
    let std = marginal_std(&wd, &basis)?;

    println!("   t   mean0    std0   mean1    std1");
    for k in (0..101).step_by(20) {
        println!(
            "{:.2} {:+.4} {:.4} {:+.4} {:.4}",
            grid.time(k),
            mean.values()[(k, 0)],
            std[(k, 0)],
            mean.values()[(k, 1)],
            std[(k, 1)]
        );
    }
    for (i, s) in sample_trajectories(&wd, &basis, &init, 3, 11)?.iter().enumerate() {
        println!("sample {i}: y0(0.5) = {:+.4}", s.values()[(50, 0)]);
    }
    Ok(())
}
