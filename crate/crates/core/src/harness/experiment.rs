use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{fit_model, FitConfig, Model};
use super::run::{execute, RunOutcome};
use super::Method;
use crate::demos::{generate_demos, DemoDataset, ScriptParams};
use crate::error::{Error, Result};
use crate::famp::ReplanConfig;
use crate::sim::EnvConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Replay,
    VerticalAdaptation,
    HorizontalAdaptation,
    PowerPlug,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Replay,
        Experiment::VerticalAdaptation,
        Experiment::HorizontalAdaptation,
        Experiment::PowerPlug,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Replay => "replay",
            Experiment::VerticalAdaptation => "vertical_adaptation",
            Experiment::HorizontalAdaptation => "horizontal_adaptation",
            Experiment::PowerPlug => "power_plug",
        }
    }
}

fn default_runs() -> usize {
    7
}

fn all_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fit: FitConfig,
    /// Replaces the scenario's replanning parameters.
    #[serde(default)]
    pub replan: Option<ReplanConfig>,
    #[serde(default)]
    pub sensor_noise_std: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            methods: all_methods(),
            n_runs: default_runs(),
            seed: 0,
            fit: FitConfig::default(),
            replan: None,
            sensor_noise_std: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::Config("n_runs must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if let Some(r) = &self.replan {
            r.validate()?;
        }
        Ok(())
    }

    /// Seed of run `i`.
    pub fn run_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_mul(1000).wrapping_add(i as u64)
    }
}

/// Training environments, test environment and task for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub train: Vec<(EnvConfig, usize)>,
    pub test: EnvConfig,
    pub script: ScriptParams,
    pub required_clicks: usize,
    pub replan: ReplanConfig,
}

impl Scenario {
    pub fn for_experiment(experiment: Experiment) -> Self {
        let script = ScriptParams::default();
        let replan = Self::replan_defaults();
        match experiment {
            Experiment::Replay => Self {
                train: vec![(EnvConfig::vertical_soft(), 7)],
                test: EnvConfig::vertical_soft(),
                script,
                required_clicks: 3,
                replan,
            },
            Experiment::VerticalAdaptation => Self {
                train: vec![(EnvConfig::vertical_soft(), 7), (EnvConfig::vertical_firm(), 7)],
                test: EnvConfig::vertical_firm(),
                script,
                required_clicks: 3,
                replan,
            },
            Experiment::HorizontalAdaptation => Self {
                train: vec![
                    (EnvConfig::horizontal(900.0, -0.02), 7),
                    (EnvConfig::horizontal(900.0, 0.02), 7),
                ],
                test: EnvConfig::horizontal(900.0, 0.02),
                script,
                required_clicks: 3,
                replan,
            },
            Experiment::PowerPlug => Self {
                train: vec![(EnvConfig::power_plug(200.0), 7), (EnvConfig::power_plug(900.0), 1)],
                test: EnvConfig::power_plug(900.0),
                script: ScriptParams { required_clicks: 1, ..script },
                required_clicks: 1,
                replan,
            },
        }
    }

    /// Replanning parameters shared by all scenarios: δ of 1 N is about three
    /// times the per-step force spread of a single-mode demonstration set, and
    /// the measured force is conditioned at the instant it is read.
    pub fn replan_defaults() -> ReplanConfig {
        ReplanConfig { delta: 1.0, cond_lead: 0.0, obs_noise: 0.01, ..ReplanConfig::default() }
    }

    fn with_noise(mut self, std: f64) -> Self {
        for (env, _) in &mut self.train {
            env.sensor_noise_std = std;
        }
        self.test.sensor_noise_std = std;
        self
    }
}

/// Generates the training demonstrations; group `g` uses seeds from
/// `seed·1000 + 500 + 100·g`.
pub fn training_demos(scenario: &Scenario, seed: u64) -> Result<DemoDataset> {
    let mut merged: Option<DemoDataset> = None;
    for (g, (env, n)) in scenario.train.iter().enumerate() {
        let base = seed.wrapping_mul(1000).wrapping_add(500 + 100 * g as u64);
        let ds = generate_demos(env, &scenario.script, *n, base)?;
        merged = Some(match merged {
            None => ds,
            Some(m) => m.merge(ds, "training")?,
        });
    }
    merged.ok_or_else(|| Error::Config("scenario has no training groups".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub method: Method,
    pub run: usize,
    pub seed: u64,
    pub inserted: bool,
    pub clicks: usize,
    /// Distance to the seat point in millimeters.
    pub position_error_mm: Option<f64>,
    pub relative_error: Option<f64>,
    pub replan_events: usize,
    pub max_force: Option<f64>,
    pub demo_index: Option<usize>,
    pub demo_k_plug: Option<f64>,
    pub incomplete: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub runs: usize,
    pub mean_position_error_mm: Option<f64>,
    /// Not part of the original table; added for pass/fail bookkeeping.
    pub success_rate: f64,
    pub mean_replan_events: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub experiment: Experiment,
    pub seat_depth_mm: f64,
    pub summary: Vec<MethodSummary>,
    pub rows: Vec<RunRow>,
}

impl ResultsTable {
    pub fn from_rows(experiment: Experiment, seat_depth_mm: f64, rows: Vec<RunRow>) -> Self {
        let mut methods: Vec<Method> = Vec::new();
        for r in &rows {
            if !methods.contains(&r.method) {
                methods.push(r.method);
            }
        }
        let summary = methods.into_iter().map(|m| summarize(m, &rows)).collect();
        Self { experiment, seat_depth_mm, summary, rows }
    }

    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &RunRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn rows_csv(&self) -> String {
        let mut out = String::from(
            "method,run,seed,inserted,clicks,position_error_mm,relative_error,replan_events,max_force,demo_index,demo_k_plug,incomplete,error\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.method,
                r.run,
                r.seed,
                r.inserted,
                r.clicks,
                opt(r.position_error_mm),
                opt(r.relative_error),
                r.replan_events,
                opt(r.max_force),
                r.demo_index.map_or(String::new(), |i| i.to_string()),
                opt(r.demo_k_plug),
                r.incomplete,
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            );
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("experiment,method,runs,mean_position_error_mm,success_rate,mean_replan_events\n");
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.experiment.name(),
                s.method,
                s.runs,
                opt(s.mean_position_error_mm),
                s.success_rate,
                s.mean_replan_events
            );
        }
        out
    }

    /// Writes `results.json`, `results.csv` and `summary.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = serde_json::to_string_pretty(self)
            .map_err(|source| Error::Parse { context: "results table".into(), source })?;
        for (name, text) in [("results.json", json), ("results.csv", self.rows_csv()), ("summary.csv", self.summary_csv())] {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn summarize(method: Method, rows: &[RunRow]) -> MethodSummary {
    let mine: Vec<&RunRow> = rows.iter().filter(|r| r.method == method).collect();
    let errors: Vec<f64> = mine.iter().filter_map(|r| r.position_error_mm).collect();
    let runs = mine.len();
    MethodSummary {
        method,
        runs,
        mean_position_error_mm: (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64),
        success_rate: mine.iter().filter(|r| r.inserted).count() as f64 / runs.max(1) as f64,
        mean_replan_events: mine.iter().map(|r| r.replan_events as f64).sum::<f64>() / runs.max(1) as f64,
    }
}

fn row(method: Method, run: usize, seed: u64, seat_depth: f64, outcome: Result<RunOutcome>) -> RunRow {
    match outcome {
        Ok(o) => RunRow {
            method,
            run,
            seed,
            inserted: o.metrics.inserted,
            clicks: o.metrics.clicks,
            position_error_mm: Some(o.metrics.final_position_error * 1000.0),
            relative_error: Some(o.metrics.final_position_error / seat_depth),
            replan_events: o.replan_count(),
            max_force: Some(o.metrics.max_force),
            demo_index: o.demo_index,
            demo_k_plug: o.demo_k_plug,
            incomplete: o.metrics.incomplete,
            error: None,
        },
        Err(e) => RunRow {
            method,
            run,
            seed,
            inserted: false,
            clicks: 0,
            position_error_mm: None,
            relative_error: None,
            replan_events: 0,
            max_force: None,
            demo_index: None,
            demo_k_plug: None,
            incomplete: true,
            error: Some(e.to_string()),
        },
    }
}

/// Everything produced by one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: ResultsTable,
    pub demos: DemoDataset,
    pub models: Vec<Model>,
    pub outcomes: Vec<RunOutcome>,
}

/// Generates demos, fits every method and runs it `n_runs` times on the test
/// environment. Runs are executed in order so results are reproducible.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let mut scenario = Scenario::for_experiment(cfg.experiment);
    if let Some(std) = cfg.sensor_noise_std {
        scenario = scenario.with_noise(std);
    }
    if let Some(r) = &cfg.replan {
        scenario.replan = r.clone();
    }
    let demos = training_demos(&scenario, cfg.seed)?;
    let seat_depth = scenario.test.seat_depth(scenario.required_clicks)?;
    let mut rows = Vec::new();
    let mut models = Vec::new();
    let mut outcomes = Vec::new();
    for &method in &cfg.methods {
        let model = fit_model(&demos, method, &cfg.fit)?;
        for i in 0..cfg.n_runs {
            let seed = cfg.run_seed(i);
            let outcome = execute(&model, &scenario.test, seed, scenario.required_clicks, &scenario.replan);
            if let Ok(o) = &outcome {
                outcomes.push(o.clone());
            }
            rows.push(row(method, i, seed, seat_depth, outcome));
        }
        models.push(model);
    }
    Ok(ExperimentOutput {
        table: ResultsTable::from_rows(cfg.experiment, seat_depth * 1000.0, rows),
        demos,
        models,
        outcomes,
    })
}
