use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use faprodmp::harness::cli::{
    cmd_demo_gen, cmd_execute, cmd_experiment, cmd_export_plots, cmd_fit, describe, exit_code,
};
use faprodmp::harness::Method;

#[derive(Parser)]
#[command(name = "faprodmp", version, about = "Force-aware movement primitives on a simulated peg-in-hole rig")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate scripted demonstrations.
    DemoGen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a method to a demonstration dataset.
    Fit {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        out: PathBuf,
        /// Optional fit parameters (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Execute a fitted model once in the simulator.
    Execute {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one of the four experiments with every selected method.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn an execution log into CSV series for plotting.
    ExportPlots {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> faprodmp::Result<ExitCode> {
    match cli.command {
        Command::DemoGen { config, out } => {
            let ds = cmd_demo_gen(&config, &out)?;
            for (i, r) in ds.records.iter().enumerate() {
                println!("record {i}: inserted ({} clicks)", r.meta.get("clicks").map_or("?".into(), |c| c.to_string()));
            }
            println!("wrote {} records to {}", ds.len(), out.display());
        }
        Command::Fit { dataset, method, out, config } => {
            cmd_fit(&dataset, method, &out, config.as_deref())?;
            println!("wrote {method} model to {}", out.display());
        }
        Command::Execute { model, config, method, seed, out } => {
            let outcome = cmd_execute(&model, &config, method, seed, &out)?;
            println!("{}", describe(&outcome.metrics, outcome.replan_count()));
            if let Some(fault) = &outcome.log.fault {
                eprintln!("error: {fault}");
                return Ok(ExitCode::from(5));
            }
        }
        Command::Experiment { config, seed, out } => {
            let table = cmd_experiment(&config, seed, &out)?;
            println!("{}", table.summary_csv().trim_end());
        }
        Command::ExportPlots { log, out } => {
            for path in cmd_export_plots(&log, &out)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
