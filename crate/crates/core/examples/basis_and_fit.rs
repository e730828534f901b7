//! Builds a ProDMP basis, composes a trajectory from known weights and fits
//! the weights back from the trajectory.
//!
//!     cargo run --example basis_and_fit

use faprodmp::mp::{build_basis, fit_weights, integrate_dmp, BasisKind, DmpConfig, InitialState, TimeGrid, WeightVector};
use nalgebra::DVector;

fn main() -> faprodmp::Result<()> {
    let cfg = DmpConfig::for_duration(2.0).with_basis(8);
    let grid = TimeGrid::new(2.0, 201)?;
    let basis = build_basis(&cfg, &grid, BasisKind::ProDmp)?;

    // One dimension: eight forcing weights and the goal.
    let mut w: Vec<f64> = (0..8).map(|i| 40.0 * ((i as f64) * 0.9).sin()).collect();
    w.push(0.5);
    let omega = WeightVector::new(DVector::from_vec(w));
    let init = InitialState::new(DVector::from_element(1, 0.1), DVector::from_element(1, 0.0));

    let traj = basis.compose(&omega, &init)?;
    for k in (0..grid.n_steps()).step_by(25) {
        println!("t={:.2}  y={:+.4}", grid.time(k), traj.values()[(k, 0)]);
    }

    let back = fit_weights(&traj, &basis, &init, 0.0)?;
    let rel = (back.as_vector() - omega.as_vector()).norm() / omega.as_vector().norm();
    println!("refit relative weight error: {rel:.2e}");

    let stepped = integrate_dmp(&cfg, &omega, &init, &grid)?;
    println!("closed form vs integrated: {:.2e}", (stepped.values() - traj.values()).amax());
    Ok(())
}
