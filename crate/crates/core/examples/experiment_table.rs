//! Runs the four simulated experiments with all five methods and prints a
//! results table per experiment.
//!
//!     cargo run --release --example experiment_table [experiment]

use faprodmp::harness::{run_experiment, Experiment, ExperimentConfig};

fn main() -> faprodmp::Result<()> {
    let only = std::env::args().nth(1);
    for experiment in Experiment::ALL {
        if only.as_deref().is_some_and(|name| name != experiment.name()) {
            continue;
        }
        let started = std::time::Instant::now();
        let out = run_experiment(&ExperimentConfig::new(experiment))?;
        let table = &out.table;
        println!("== {} (seat depth {:.1} mm, {:.1?})", experiment.name(), table.seat_depth_mm, started.elapsed());
        println!("{:<10} {:>10} {:>8} {:>8}", "method", "error mm", "success", "replans");
        for s in &table.summary {
            println!(
                "{:<10} {:>10.2} {:>8.2} {:>8.2}",
                s.method.name(),
                s.mean_position_error_mm.unwrap_or(f64::NAN),
                s.success_rate,
                s.mean_replan_events
            );
        }
        for r in &table.rows {
            println!(
                "  {:<9} run {} inserted={} clicks={} err={:.2}mm replans={} demo={:?} k={:?} {}",
                r.method.name(),
                r.run,
                r.inserted,
                r.clicks,
                r.position_error_mm.unwrap_or(f64::NAN),
                r.replan_events,
                r.demo_index,
                r.demo_k_plug,
                r.error.as_deref().unwrap_or("")
            );
        }
    }
    Ok(())
}
