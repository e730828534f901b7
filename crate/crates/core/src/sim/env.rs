use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::config::EnvConfig;
use super::contact::{detent_force, detents_passed, floor_force};
use crate::error::{Error, Result};
use crate::famp::Environment;
use crate::mp::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
    pub passed_detents: usize,
    pub t: f64,
}

impl SimState {
    pub fn at_rest(cfg: &EnvConfig) -> Self {
        let position = DVector::from_column_slice(&cfg.start_position);
        let n = position.len();
        Self {
            passed_detents: detents_passed(depth_of(&position, cfg), cfg),
            position,
            velocity: DVector::zeros(n),
            t: 0.0,
        }
    }
}

fn axis(cfg: &EnvConfig) -> DVector<f64> {
    DVector::from_column_slice(&cfg.channel_axis)
}

/// Signed insertion depth along the channel axis; negative outside.
pub fn depth_of(position: &DVector<f64>, cfg: &EnvConfig) -> f64 {
    position
        .iter()
        .zip(&cfg.socket_origin)
        .zip(&cfg.channel_axis)
        .map(|((p, o), a)| (p - o) * a)
        .sum()
}

/// Force exerted by the socket on the plug.
pub fn contact_force(position: &DVector<f64>, velocity: &DVector<f64>, cfg: &EnvConfig) -> DVector<f64> {
    let n = position.len();
    let depth = depth_of(position, cfg);
    if depth <= 0.0 {
        return DVector::zeros(n);
    }
    let a = axis(cfg);
    let axial_vel = velocity.dot(&a);
    let resistance = detent_force(depth, cfg) + floor_force(depth, axial_vel, cfg);
    let offset = position - DVector::from_column_slice(&cfg.socket_origin);
    let lateral = &offset - &a * depth;
    -&a * resistance - lateral * cfg.lateral_stiffness
}

/// One physics tick. Returns the new state and the noisy force reading at it.
pub fn step(
    state: &SimState,
    desired_position: &DVector<f64>,
    desired_velocity: &DVector<f64>,
    cfg: &EnvConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(SimState, DVector<f64>)> {
    let (next, contact) = step_physics(state, desired_position, desired_velocity, cfg)?;
    let measured = add_noise(contact, cfg, rng);
    Ok((next, measured))
}

fn step_physics(
    state: &SimState,
    desired_position: &DVector<f64>,
    desired_velocity: &DVector<f64>,
    cfg: &EnvConfig,
) -> Result<(SimState, DVector<f64>)> {
    let control = (desired_position - &state.position) * cfg.kp + (desired_velocity - &state.velocity) * cfg.kd;
    let contact = contact_force(&state.position, &state.velocity, cfg);
    let accel = (control + contact) / cfg.mass;
    let velocity = &state.velocity + accel * cfg.dt;
    let position = &state.position + &velocity * cfg.dt;
    let t = state.t + cfg.dt;
    if !(position.iter().chain(velocity.iter()).all(|v| v.is_finite())) {
        return Err(Error::EnvFault { t, reason: "non-finite state".into() });
    }
    let passed = state.passed_detents.max(detents_passed(depth_of(&position, cfg), cfg));
    let contact = contact_force(&position, &velocity, cfg);
    Ok((SimState { position, velocity, passed_detents: passed, t }, contact))
}

fn add_noise(mut force: DVector<f64>, cfg: &EnvConfig, rng: &mut ChaCha8Rng) -> DVector<f64> {
    if cfg.sensor_noise_std > 0.0 {
        let normal = Normal::new(0.0, cfg.sensor_noise_std).expect("validated noise std");
        for f in force.iter_mut() {
            *f += normal.sample(rng);
        }
    }
    force
}

/// Simulator bound to one seeded noise stream.
#[derive(Debug, Clone)]
pub struct SimEnv {
    cfg: EnvConfig,
    state: SimState,
    rng: ChaCha8Rng,
    last_contact: DVector<f64>,
}

impl SimEnv {
    pub fn new(cfg: EnvConfig) -> Result<Self> {
        cfg.validate()?;
        let state = SimState::at_rest(&cfg);
        let last_contact = contact_force(&state.position, &state.velocity, &cfg);
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(Self { cfg, state, rng, last_contact })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    /// Noise-free force at the current state.
    pub fn contact(&self) -> &DVector<f64> {
        &self.last_contact
    }

    pub fn depth(&self) -> f64 {
        depth_of(&self.state.position, &self.cfg)
    }

    fn check_dims(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.cfg.n_pos_dims {
            return Err(Error::Shape(format!(
                "desired state has {} dims, environment has {}",
                v.len(),
                self.cfg.n_pos_dims
            )));
        }
        Ok(())
    }
}

impl Environment for SimEnv {
    fn n_pos_dims(&self) -> usize {
        self.cfg.n_pos_dims
    }

    fn control_dt(&self) -> f64 {
        self.cfg.control_dt
    }

    fn time(&self) -> f64 {
        self.state.t
    }

    fn position(&self) -> DVector<f64> {
        self.state.position.clone()
    }

    fn sense(&mut self) -> DVector<f64> {
        add_noise(self.last_contact.clone(), &self.cfg, &mut self.rng)
    }

    fn advance(&mut self, desired_position: &DVector<f64>, desired_velocity: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dims(desired_position)?;
        self.check_dims(desired_velocity)?;
        for _ in 0..self.cfg.substeps() {
            let (next, contact) = step_physics(&self.state, desired_position, desired_velocity, &self.cfg)?;
            self.state = next;
            self.last_contact = contact;
        }
        Ok(self.sense())
    }
}

/// One logged control step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStep {
    pub t: f64,
    pub desired: Vec<f64>,
    pub position: Vec<f64>,
    pub contact_force: Vec<f64>,
    pub measured_force: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub steps: Vec<EpisodeStep>,
    pub terminal: SimState,
    /// False when a fault cut the episode short.
    pub complete: bool,
    pub fault: Option<String>,
}

impl EpisodeLog {
    pub fn max_force(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.measured_force.iter().map(|f| f * f).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Measured forces as a trajectory on the control grid.
    pub fn measured_forces(&self) -> Result<Trajectory> {
        let rows: Vec<Vec<f64>> = self.steps.iter().map(|s| s.measured_force.clone()).collect();
        self.to_trajectory(&rows)
    }

    pub fn positions(&self) -> Result<Trajectory> {
        let rows: Vec<Vec<f64>> = self.steps.iter().map(|s| s.position.clone()).collect();
        self.to_trajectory(&rows)
    }

    pub fn desired(&self) -> Result<Trajectory> {
        let rows: Vec<Vec<f64>> = self.steps.iter().map(|s| s.desired.clone()).collect();
        self.to_trajectory(&rows)
    }

    fn to_trajectory(&self, rows: &[Vec<f64>]) -> Result<Trajectory> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData("episode log has fewer than two steps".into()));
        }
        let duration = self.steps.last().map_or(0.0, |s| s.t) - self.steps[0].t;
        Trajectory::from_rows(crate::mp::TimeGrid::new(duration, rows.len())?, rows)
    }
}

/// Source of desired states, queried once per control step.
pub trait DesiredProvider {
    fn n_steps(&self) -> usize;
    fn desired(&mut self, step: usize, t: f64) -> (DVector<f64>, DVector<f64>);
}

/// Replays a fixed trajectory, velocities from finite differences.
pub struct TrajectoryProvider {
    positions: Trajectory,
    velocities: nalgebra::DMatrix<f64>,
}

impl TrajectoryProvider {
    pub fn new(positions: Trajectory) -> Self {
        let velocities = positions.velocities();
        Self { positions, velocities }
    }
}

impl DesiredProvider for TrajectoryProvider {
    fn n_steps(&self) -> usize {
        self.positions.n_steps()
    }

    fn desired(&mut self, step: usize, _t: f64) -> (DVector<f64>, DVector<f64>) {
        (self.positions.row(step), self.velocities.row(step).transpose())
    }
}

/// Holds the start pose forever.
pub struct HoldProvider {
    pub position: DVector<f64>,
    pub n_steps: usize,
}

impl DesiredProvider for HoldProvider {
    fn n_steps(&self) -> usize {
        self.n_steps
    }

    fn desired(&mut self, _step: usize, _t: f64) -> (DVector<f64>, DVector<f64>) {
        let n = self.position.len();
        (self.position.clone(), DVector::zeros(n))
    }
}

/// Runs a whole episode. Step 0 logs the start state; each further step
/// tracks the provider's desired state for one control period.
pub fn run_episode(cfg: &EnvConfig, provider: &mut dyn DesiredProvider) -> Result<EpisodeLog> {
    let mut env = SimEnv::new(cfg.clone())?;
    let n = provider.n_steps();
    let mut steps = Vec::with_capacity(n);
    let mut fault = None;
    for k in 0..n {
        let t = k as f64 * cfg.control_dt;
        let (p, v) = provider.desired(k, t);
        let measured = if k == 0 {
            env.sense()
        } else {
            match env.advance(&p, &v) {
                Ok(f) => f,
                Err(e @ Error::EnvFault { .. }) => {
                    fault = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            }
        };
        steps.push(EpisodeStep {
            t,
            desired: p.iter().copied().collect(),
            position: env.state.position.iter().copied().collect(),
            contact_force: env.last_contact.iter().copied().collect(),
            measured_force: measured.iter().copied().collect(),
        });
    }
    Ok(EpisodeLog { steps, terminal: env.state.clone(), complete: fault.is_none(), fault })
}
