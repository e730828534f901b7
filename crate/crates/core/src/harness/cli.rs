//! File-level commands behind the `faprodmp` binary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::experiment::{run_experiment, ExperimentConfig, Scenario};
use super::model::{fit_model, load_model, save_model, FitConfig};
use super::plots::{export_plots, load_execution_log, save_execution_log};
use super::run::{execute, RunOutcome};
use super::Method;
use crate::demos::{generate_demos, load_dataset, save_dataset, DemoDataset, ScriptParams};
use crate::error::{Error, Result};
use crate::famp::ReplanConfig;
use crate::sim::{EnvConfig, Metrics};

/// Either a named preset or a full environment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvSpec {
    Preset { preset: String },
    Full(EnvConfig),
}

impl EnvSpec {
    pub const PRESETS: [&'static str; 7] = [
        "vertical_soft",
        "vertical_firm",
        "horizontal_near",
        "horizontal_far",
        "power_plug_low",
        "power_plug_high",
        "power_plug_medium",
    ];

    pub fn resolve(&self) -> Result<EnvConfig> {
        let cfg = match self {
            EnvSpec::Full(cfg) => cfg.clone(),
            EnvSpec::Preset { preset } => match preset.as_str() {
                "vertical_soft" => EnvConfig::vertical_soft(),
                "vertical_firm" => EnvConfig::vertical_firm(),
                "horizontal_near" => EnvConfig::horizontal(900.0, -0.02),
                "horizontal_far" => EnvConfig::horizontal(900.0, 0.02),
                "power_plug_low" => EnvConfig::power_plug(200.0),
                "power_plug_medium" => EnvConfig::power_plug(400.0),
                "power_plug_high" => EnvConfig::power_plug(900.0),
                other => {
                    return Err(Error::Config(format!(
                        "unknown environment preset {other:?}; known: {}",
                        Self::PRESETS.join(", ")
                    )))
                }
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoGroup {
    pub env: EnvSpec,
    pub n: usize,
}

/// Input of `demo-gen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoGenConfig {
    pub groups: Vec<DemoGroup>,
    #[serde(default)]
    pub script: ScriptParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub task: Option<String>,
}

/// Input of `execute`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecuteConfig {
    pub env: EnvSpec,
    #[serde(default = "default_clicks")]
    pub required_clicks: usize,
    #[serde(default = "Scenario::replan_defaults")]
    pub replan: ReplanConfig,
}

fn default_clicks() -> usize {
    3
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Parse { context: path.display().to_string(), source })
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value)
        .map_err(|source| Error::Parse { context: path.display().to_string(), source })?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn ensure_parent(file: &Path) -> Result<()> {
    match file.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => ensure_dir(dir),
        _ => Ok(()),
    }
}

/// Generates every group of the config; group `g` uses seeds from `seed + 100·g`.
pub fn cmd_demo_gen(config: &Path, out: &Path) -> Result<DemoDataset> {
    let cfg: DemoGenConfig = read_json(config)?;
    if cfg.groups.is_empty() {
        return Err(Error::Config("demo-gen config lists no groups".into()));
    }
    let mut merged: Option<DemoDataset> = None;
    for (g, group) in cfg.groups.iter().enumerate() {
        let ds = generate_demos(&group.env.resolve()?, &cfg.script, group.n, cfg.seed + 100 * g as u64)?;
        merged = Some(match merged {
            None => ds,
            Some(m) => {
                let task = m.task.clone();
                m.merge(ds, task)?
            }
        });
    }
    let mut ds = merged.expect("at least one group");
    if let Some(task) = cfg.task {
        ds.task = task;
    }
    ensure_parent(out)?;
    save_dataset(&ds, out)?;
    Ok(ds)
}

pub fn cmd_fit(dataset: &Path, method: Method, out: &Path, config: Option<&Path>) -> Result<()> {
    let fit_cfg: FitConfig = match config {
        Some(p) => read_json(p)?,
        None => FitConfig::default(),
    };
    let ds = load_dataset(dataset)?;
    let model = fit_model(&ds, method, &fit_cfg)?;
    ensure_parent(out)?;
    save_model(&model, out)
}

/// Runs the model once and writes `log.json` and `metrics.json` into `out`.
pub fn cmd_execute(model: &Path, config: &Path, method: Option<Method>, seed: u64, out: &Path) -> Result<RunOutcome> {
    let model = load_model(model)?;
    if let Some(m) = method {
        if m != model.method {
            return Err(Error::Config(format!("model was fitted for {}, not {m}", model.method)));
        }
    }
    let cfg: ExecuteConfig = read_json(config)?;
    let env = cfg.env.resolve()?;
    let outcome = execute(&model, &env, seed, cfg.required_clicks, &cfg.replan)?;
    ensure_dir(out)?;
    save_execution_log(&outcome.log, out.join("log.json"))?;
    write_json(&outcome.metrics, out.join("metrics.json"))?;
    Ok(outcome)
}

/// Runs an experiment and writes the results table plus one log per run.
pub fn cmd_experiment(config: &Path, seed: Option<u64>, out: &Path) -> Result<super::ResultsTable> {
    let mut cfg: ExperimentConfig = read_json(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let output = run_experiment(&cfg)?;
    output.table.write(out)?;
    let logs = out.join("logs");
    ensure_dir(&logs)?;
    for o in &output.outcomes {
        let run = o.seed - cfg.run_seed(0);
        save_execution_log(&o.log, logs.join(format!("{}_run{run}.json", o.method)))?;
    }
    Ok(output.table)
}

pub fn cmd_export_plots(log: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let log = load_execution_log(log)?;
    export_plots(&log, out)
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io { .. } | Error::Parse { .. } | Error::Version { .. } => 2,
        Error::Generation { .. } => 3,
        Error::InsufficientData(_) => 4,
        Error::EnvFault { .. } => 5,
        _ => 1,
    }
}

/// Metrics summary line printed by `execute`.
pub fn describe(metrics: &Metrics, replans: usize) -> String {
    format!(
        "inserted={} clicks={} position_error={:.2}mm max_force={:.2}N replans={}{}",
        metrics.inserted,
        metrics.clicks,
        metrics.final_position_error * 1000.0,
        metrics.max_force,
        replans,
        if metrics.incomplete { " (incomplete)" } else { "" }
    )
}
