use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::joint::JointSpaceConfig;
use super::replan::{replan, replan_trigger, ForceMeasurement, ReplanConfig, ReplanEvent, ReplanRequest};
use crate::error::{Error, Result};
use crate::mp::{BasisSystem, InitialState, Trajectory, WeightDistribution};

/// A controllable environment stepped at a fixed control period.
pub trait Environment {
    fn n_pos_dims(&self) -> usize;
    fn control_dt(&self) -> f64;
    fn time(&self) -> f64;
    fn position(&self) -> DVector<f64>;
    /// Current force reading without advancing time.
    fn sense(&mut self) -> DVector<f64>;
    /// Tracks the desired state for one control period and returns the force
    /// reading at its end.
    fn advance(&mut self, desired_position: &DVector<f64>, desired_velocity: &DVector<f64>) -> Result<DVector<f64>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub t: f64,
    pub desired_position: Vec<f64>,
    pub actual_position: Vec<f64>,
    pub expected_force: Vec<f64>,
    pub expected_force_std: Vec<f64>,
    pub measured_force: Vec<f64>,
    pub replanned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionLog {
    pub layout: JointSpaceConfig,
    pub records: Vec<ExecutionRecord>,
    pub events: Vec<ReplanEvent>,
    pub complete: bool,
    pub fault: Option<String>,
}

impl ExecutionLog {
    pub fn replan_count(&self) -> usize {
        self.events.len()
    }
}

/// Which replanning behaviour to run while executing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monitoring {
    Enabled,
    /// Execute the initial mean only; used for comparison runs.
    Disabled,
}

/// Streams the FA-ProDMP mean to the environment, compares every force
/// reading with the expected force of the current desired trajectory, and
/// replans when the deviation exceeds δ outside the cooldown window.
pub fn execute_with_monitor<E: Environment + ?Sized>(
    env: &mut E,
    wd: &WeightDistribution,
    basis: &BasisSystem,
    init: &InitialState,
    layout: &JointSpaceConfig,
    cfg: &ReplanConfig,
) -> Result<ExecutionLog> {
    run_monitored(env, wd, basis, init, layout, cfg, Monitoring::Enabled)
}

pub fn run_monitored<E: Environment + ?Sized>(
    env: &mut E,
    wd: &WeightDistribution,
    basis: &BasisSystem,
    init: &InitialState,
    layout: &JointSpaceConfig,
    cfg: &ReplanConfig,
    monitoring: Monitoring,
) -> Result<ExecutionLog> {
    cfg.validate()?;
    if wd.n_dims() != layout.total() {
        return Err(Error::Shape(format!(
            "distribution has {} dims, layout {}",
            wd.n_dims(),
            layout.total()
        )));
    }
    if env.n_pos_dims() != layout.d_pos {
        return Err(Error::Shape(format!(
            "environment has {} position dims, model {}",
            env.n_pos_dims(),
            layout.d_pos
        )));
    }
    let grid = *basis.grid();
    if (grid.dt() - env.control_dt()).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "trajectory dt {} differs from control period {}",
            grid.dt(),
            env.control_dt()
        )));
    }
    let (d, f) = (layout.d_pos, layout.f_force);

    let mut wd_current = wd.clone();
    let mut lam_des = basis.compose(&wd.mean_weights(), init)?;
    let mut vel_des = lam_des.velocities();
    let mut force_std = force_band(&wd_current, basis, layout)?;
    let mut last_replan: Option<f64> = None;
    let mut records = Vec::with_capacity(grid.n_steps());
    let mut events = Vec::new();

    let tau0 = env.sense();
    records.push(record(0.0, &lam_des, &force_std, 0, env.position(), &tau0, d, f, false));

    for k in 1..grid.n_steps() {
        let pos = lam_des.row(k).rows(0, d).into_owned();
        let vel = vel_des.row(k).transpose().rows(0, d).into_owned();
        let measured = match env.advance(&pos, &vel) {
            Ok(m) => m,
            Err(e) => {
                return Ok(ExecutionLog {
                    layout: layout.clone(),
                    records,
                    events,
                    complete: false,
                    fault: Some(e.to_string()),
                });
            }
        };
        let t = grid.time(k);
        let expected: Vec<f64> = (0..f).map(|i| lam_des.values()[(k, d + i)]).collect();
        let mut replanned = false;

        let (triggered, _) = replan_trigger(&expected, measured.as_slice(), cfg.delta)?;
        let cooled = last_replan.is_none_or(|t0| t - t0 >= cfg.cooldown);
        if monitoring == Monitoring::Enabled && triggered && cooled && k + 1 < grid.n_steps() {
            let init_now = InitialState::new(lam_des.row(k), vel_des.row(k).transpose());
            let measurement = ForceMeasurement { t, tau: measured.clone() };
            let outcome = replan(
                &ReplanRequest {
                    wd: &wd_current,
                    basis,
                    init_start: init,
                    lam_old: &lam_des,
                    init_now,
                    t_now: t,
                    measurement: &measurement,
                    expected: &expected,
                    last_replan,
                },
                cfg,
                layout,
            )?;
            wd_current = outcome.wd;
            lam_des = outcome.lam_des;
            vel_des = lam_des.velocities();
            force_std = force_band(&wd_current, basis, layout)?;
            last_replan = Some(t);
            events.push(outcome.event);
            replanned = true;
        }

        let mut rec = record(t, &lam_des, &force_std, k, env.position(), &measured, d, f, replanned);
        // Log the expectation the trigger compared against, not the replanned one.
        rec.expected_force = expected;
        records.push(rec);
    }

    Ok(ExecutionLog {
        layout: layout.clone(),
        records,
        events,
        complete: true,
        fault: None,
    })
}

fn force_band(wd: &WeightDistribution, basis: &BasisSystem, layout: &JointSpaceConfig) -> Result<nalgebra::DMatrix<f64>> {
    let marg = wd.marginal_dims(layout.d_pos, layout.f_force)?;
    crate::mp::marginal_std(&marg, basis)
}

#[allow(clippy::too_many_arguments)]
fn record(
    t: f64,
    lam_des: &Trajectory,
    force_std: &nalgebra::DMatrix<f64>,
    k: usize,
    actual: DVector<f64>,
    measured: &DVector<f64>,
    d: usize,
    f: usize,
    replanned: bool,
) -> ExecutionRecord {
    let row = lam_des.row(k);
    ExecutionRecord {
        t,
        desired_position: row.rows(0, d).iter().copied().collect(),
        actual_position: actual.iter().copied().collect(),
        expected_force: row.rows(d, f).iter().copied().collect(),
        expected_force_std: force_std.row(k).iter().copied().collect(),
        measured_force: measured.iter().copied().collect(),
        replanned,
    }
}
