//! The demo-gen / fit / execute / export-plots pipeline of the command line
//! tool, driven from code against the bundled configs.
//!
//!     cargo run --release --example cli_workflow

use std::path::Path;

use faprodmp::harness::cli::{cmd_demo_gen, cmd_execute, cmd_export_plots, cmd_fit, describe};
use faprodmp::harness::Method;

fn main() -> faprodmp::Result<()> {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let work = std::env::temp_dir().join("faprodmp_cli_workflow");

    let demos = work.join("demos.json");
    let ds = cmd_demo_gen(&configs.join("demos_vertical_mixed.json"), &demos)?;
    println!("{} demonstrations -> {}", ds.len(), demos.display());

    let model = work.join("faprodmp.json");
    cmd_fit(&demos, Method::Faprodmp, &model, None)?;

    let run = work.join("run");
    let outcome = cmd_execute(&model, &configs.join("execute_vertical_firm.json"), None, 0, &run)?;
    println!("{}", describe(&outcome.metrics, outcome.replan_count()));

    for f in cmd_export_plots(&run.join("log.json"), &work.join("plots"))? {
        println!("{}", f.display());
    }
    Ok(())
}
