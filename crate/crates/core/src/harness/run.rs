use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::Model;
use super::Method;
use crate::error::Result;
use crate::famp::{execute_with_monitor, ExecutionLog, ExecutionRecord, JointSpaceConfig, ReplanConfig};
use crate::mp::{build_basis, fit_weights, integrate_dmp, InitialState, Trajectory, DEFAULT_RIDGE};
use crate::sim::{metrics, metrics_for_state, run_episode, EnvConfig, EpisodeLog, Metrics, SimEnv, TrajectoryProvider};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub method: Method,
    pub seed: u64,
    pub metrics: Metrics,
    /// Demonstration replayed or re-encoded (CIC and DMP only).
    pub demo_index: Option<usize>,
    pub demo_k_plug: Option<f64>,
    pub log: ExecutionLog,
}

impl RunOutcome {
    pub fn replan_count(&self) -> usize {
        self.log.replan_count()
    }
}

/// Draws the demonstration used by CIC and DMP for this seed.
pub fn sample_demo_index(seed: u64, n: usize) -> usize {
    ChaCha8Rng::seed_from_u64(seed).random_range(0..n)
}

/// Executes `model` once in a fresh environment seeded with `seed`.
pub fn execute(
    model: &Model,
    env_cfg: &EnvConfig,
    seed: u64,
    required_clicks: usize,
    replan_cfg: &ReplanConfig,
) -> Result<RunOutcome> {
    let env_cfg = env_cfg.clone().with_seed(seed);
    env_cfg.validate()?;
    let start: Vec<f64> = env_cfg.start_position.clone();
    let mut demo_index = None;
    let mut demo_k_plug = None;
    let desired = match model.method {
        Method::Faprodmp => {
            let wd = model.weights()?;
            let basis = model.basis_system()?;
            let layout = model.layout.clone().unwrap_or(JointSpaceConfig::new(model.n_pos_dims, model.n_pos_dims)?);
            let mut env = SimEnv::new(env_cfg.clone())?;
            let log = execute_with_monitor(&mut env, wd, &basis, &model.initial_state(&start), &layout, replan_cfg)?;
            let max_force = log
                .records
                .iter()
                .map(|r| r.measured_force.iter().map(|f| f * f).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            let metrics = metrics_for_state(env.state(), log.complete, max_force, &env_cfg, required_clicks)?;
            return Ok(RunOutcome { method: model.method, seed, metrics, demo_index, demo_k_plug, log });
        }
        Method::Promp | Method::Prodmp => {
            let basis = model.basis_system()?;
            basis.compose(&model.weights()?.mean_weights(), &model.initial_state(&start))?
        }
        Method::Cic | Method::Dmp => {
            let demos = model.demos()?;
            let idx = sample_demo_index(seed, demos.len());
            let record = &demos.records[idx];
            demo_index = Some(idx);
            demo_k_plug = record.meta.get("k_plug").and_then(serde_json::Value::as_f64);
            let positions = record.position_trajectory()?;
            if model.method == Method::Cic {
                positions
            } else {
                reencode_dmp(model, &positions, &start)?
            }
        }
    };
    let episode = run_episode(&env_cfg, &mut TrajectoryProvider::new(desired))?;
    let metrics = metrics(&episode, &env_cfg, required_clicks)?;
    let log = episode_to_log(&episode, env_cfg.n_pos_dims)?;
    Ok(RunOutcome { method: model.method, seed, metrics, demo_index, demo_k_plug, log })
}

/// Fits one demonstration with a single DMP and integrates it from `start`.
fn reencode_dmp(model: &Model, positions: &Trajectory, start: &[f64]) -> Result<Trajectory> {
    let basis = build_basis(&model.dmp, positions.grid(), crate::mp::BasisKind::ProDmp)?;
    let omega = fit_weights(positions, &basis, &positions.initial_state(), DEFAULT_RIDGE)?;
    let init = InitialState::new(DVector::from_column_slice(start), positions.initial_state().velocity);
    integrate_dmp(&model.dmp, &omega, &init, positions.grid())
}

/// Open-loop episodes in the same record format as monitored ones, without
/// force expectations.
fn episode_to_log(episode: &EpisodeLog, n_pos_dims: usize) -> Result<ExecutionLog> {
    let records = episode
        .steps
        .iter()
        .map(|s| ExecutionRecord {
            t: s.t,
            desired_position: s.desired.clone(),
            actual_position: s.position.clone(),
            expected_force: Vec::new(),
            expected_force_std: Vec::new(),
            measured_force: s.measured_force.clone(),
            replanned: false,
        })
        .collect();
    Ok(ExecutionLog {
        layout: JointSpaceConfig::new(n_pos_dims, n_pos_dims)?,
        records,
        events: Vec::new(),
        complete: episode.complete,
        fault: episode.fault.clone(),
    })
}
