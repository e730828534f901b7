//! Joint position/force model: conditioning the force at t = 0.6 on −20
//! also moves the position through their learned correlation.
//!
//!     cargo run --example force_conditioning

use faprodmp::famp::{condition, ConditioningSpec};
use faprodmp::mp::{build_basis, fit_weight_distribution_default, fit_weights, BasisKind, DmpConfig, InitialState, TimeGrid, Trajectory};

fn main() -> faprodmp::Result<()> {
    let grid = TimeGrid::new(1.0, 101)?;
    let basis = build_basis(&DmpConfig::for_duration(1.0), &grid, BasisKind::ProDmp)?;
    let init = InitialState::zeros(2);

    // Deeper pushes meet a proportionally larger (more negative) force.
    let weights = (0..10)
        .map(|i| {
            let depth = 0.3 + 0.04 * i as f64;
            let rows: Vec<Vec<f64>> = grid
                .times()
                .map(|t| {
                    let s = 3.0 * t * t - 2.0 * t * t * t;
                    vec![depth * s, -30.0 * depth * s]
                })
                .collect();
            fit_weights(&Trajectory::from_rows(grid, &rows)?, &basis, &init, 1e-9)
        })
        .collect::<faprodmp::Result<Vec<_>>>()?;
    let prior = fit_weight_distribution_default(&weights, 2)?;

    let spec = ConditioningSpec::new(0.6, vec![1], vec![-20.0], 1e-4);
    let post = condition(&prior, &basis, &spec, &init)?;

    let before = basis.compose(&prior.mean_weights(), &init)?;
    let after = basis.compose(&post.mean_weights(), &init)?;
    println!("   t   pos(prior) pos(cond)  force(prior) force(cond)");
    for k in (0..101).step_by(10) {
        println!(
            "{:.1}  {:+.4}    {:+.4}    {:+8.3}    {:+8.3}",
            grid.time(k),
            before.values()[(k, 0)],
            after.values()[(k, 0)],
            before.values()[(k, 1)],
            after.values()[(k, 1)]
        );
    }
    Ok(())
}
