//! Generates soft and firm demonstrations, stores them as JSON and reads
//! them back.
//!
//!     cargo run --release --example demo_dataset [out.json]

use faprodmp::demos::{generate_demos, load_dataset, save_dataset, time_normalize, ScriptParams};
use faprodmp::mp::TimeGrid;
use faprodmp::sim::EnvConfig;

fn main() -> faprodmp::Result<()> {
    let script = ScriptParams::default();
    let soft = generate_demos(&EnvConfig::vertical_soft(), &script, 7, 500)?;
    let firm = generate_demos(&EnvConfig::vertical_firm(), &script, 7, 600)?;
    let ds = soft.merge(firm, "vertical_mixed")?;

    for (i, r) in ds.records.iter().enumerate() {
        let peak = r.forces.iter().map(|f| f[0]).fold(f64::MIN, f64::max);
        println!("demo {i:>2}: k={} clicks={} steps={} max force {peak:.1}N", r.meta["k_plug"], r.meta["clicks"], r.n_steps());
    }

    let path = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("faprodmp_demos.json"), Into::into);
    save_dataset(&ds, &path)?;
    let back = load_dataset(&path)?;
    println!("round trip through {}: identical = {}", path.display(), back == ds);

    let short = time_normalize(&back.records[0], &TimeGrid::with_dt(3.0, 0.01)?)?;
    println!("normalized demo 0 to {} steps", short.n_steps());
    Ok(())
}
