//! Fits FA-ProDMP to mixed soft/firm demonstrations and executes it on the
//! firm socket with force monitoring; writes plot CSVs.
//!
//!     cargo run --release --example replanning_episode [plot-dir]

use faprodmp::demos::{generate_demos, ScriptParams};
use faprodmp::harness::{execute, export_plots, fit_model, FitConfig, Method, Scenario};
use faprodmp::sim::EnvConfig;

fn main() -> faprodmp::Result<()> {
    let script = ScriptParams::default();
    let ds = generate_demos(&EnvConfig::vertical_soft(), &script, 7, 500)?
        .merge(generate_demos(&EnvConfig::vertical_firm(), &script, 7, 600)?, "mixed")?;
    let test = EnvConfig::vertical_firm();
    let replan = Scenario::replan_defaults();

    for method in [Method::Prodmp, Method::Faprodmp] {
        let model = fit_model(&ds, method, &FitConfig::default())?;
        let run = execute(&model, &test, 7, 3, &replan)?;
        println!(
            "{method}: inserted={} clicks={} error={:.2}mm replans={}",
            run.metrics.inserted,
            run.metrics.clicks,
            run.metrics.final_position_error * 1e3,
            run.log.events.len()
        );
        for e in &run.log.events {
            println!(
                "  replan at t={:.2}s: deviation {:.2}N, conditioned on {:?} at t={:.2}s",
                e.t_trigger,
                e.deviations.iter().sum::<f64>(),
                e.conditioned_values,
                e.t_cond
            );
        }
        if method == Method::Faprodmp {
            let dir = std::env::args()
                .nth(1)
                .map_or_else(|| std::env::temp_dir().join("faprodmp_plots"), Into::into);
            for f in export_plots(&run.log, &dir)? {
                println!("  wrote {}", f.display());
            }
        }
    }
    Ok(())
}
