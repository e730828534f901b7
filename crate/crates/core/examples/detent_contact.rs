//! Resistance profile of the three-detent socket and one scripted push
//! through it.
//!
//!     cargo run --release --example detent_contact

use faprodmp::demos::{script_provider, ScriptParams};
use faprodmp::sim::{detent_force, detent_peaks, metrics, run_episode, EnvConfig};

fn main() -> faprodmp::Result<()> {
    let soft = EnvConfig::vertical_soft();
    let firm = EnvConfig::vertical_firm();
    println!("depth mm   soft N   firm N");
    for i in 0..=26 {
        let d = i as f64 * 0.001;
        println!("{:>8.0} {:>8.2} {:>8.2}", d * 1e3, detent_force(d, &soft), detent_force(d, &firm));
    }
    println!("peaks soft {:?}", detent_peaks(&soft));
    println!("peaks firm {:?}", detent_peaks(&firm));

    let script = ScriptParams::default();
    let log = run_episode(&firm, &mut script_provider(&firm, &script, 1)?)?;
    let m = metrics(&log, &firm, 3)?;
    println!(
        "scripted push on firm: clicks={} error={:.2}mm max force={:.1}N",
        m.clicks,
        m.final_position_error * 1e3,
        m.max_force
    );
    Ok(())
}
