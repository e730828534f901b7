use std::fs;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::Method;
use crate::demos::{time_normalize, DemoDataset};
use crate::error::{Error, Result};
use crate::famp::{assemble_joint_demos, JointSpaceConfig};
use crate::mp::{
    build_basis, fit_weight_distribution_default, fit_weights, BasisKind, BasisSystem, DmpConfig, InitialState,
    TimeGrid, Trajectory, WeightDistribution, DEFAULT_RIDGE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub n_basis: usize,
    pub ridge: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { n_basis: 12, ridge: DEFAULT_RIDGE }
    }
}

/// Everything an execution needs. Probabilistic methods carry a weight
/// distribution; replay-style methods carry the raw demonstrations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub method: Method,
    pub dmp: DmpConfig,
    pub basis: BasisKind,
    pub grid: TimeGrid,
    pub n_pos_dims: usize,
    pub layout: Option<JointSpaceConfig>,
    pub weights: Option<WeightDistribution>,
    /// Mean initial velocity of the modelled dimensions.
    pub init_velocity: Vec<f64>,
    /// Mean initial force reading (force dimensions only).
    pub init_force: Vec<f64>,
    pub demos: Option<DemoDataset>,
}

impl Model {
    pub fn basis_system(&self) -> Result<BasisSystem> {
        build_basis(&self.dmp, &self.grid, self.basis)
    }

    pub fn weights(&self) -> Result<&WeightDistribution> {
        self.weights
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{} model carries no weight distribution", self.method)))
    }

    pub fn demos(&self) -> Result<&DemoDataset> {
        self.demos
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{} model carries no demonstrations", self.method)))
    }

    /// Initial state for execution from `start`, the robot's position.
    pub fn initial_state(&self, start: &[f64]) -> InitialState {
        let position: Vec<f64> = start.iter().chain(&self.init_force).copied().collect();
        InitialState::new(DVector::from_vec(position), DVector::from_column_slice(&self.init_velocity))
    }
}

fn normalized(ds: &DemoDataset) -> Result<(TimeGrid, DemoDataset)> {
    let first = ds
        .records
        .first()
        .ok_or_else(|| Error::InsufficientData("dataset has no records".into()))?;
    let shortest = ds.records.iter().map(|r| r.duration).fold(f64::INFINITY, f64::min);
    let grid = TimeGrid::with_dt(shortest, first.dt)?;
    let records = ds.records.iter().map(|r| time_normalize(r, &grid)).collect::<Result<Vec<_>>>()?;
    Ok((grid, DemoDataset { records, ..ds.clone() }))
}

/// Start state of a demo. Columns from `first_force` on are force readings;
/// before contact they only carry sensor noise, so their rate is taken as 0
/// rather than a differenced noise sample.
fn demo_initial(tr: &Trajectory, first_force: usize) -> InitialState {
    let mut init = tr.initial_state();
    for d in first_force..tr.n_dims() {
        init.velocity[d] = 0.0;
    }
    init
}

fn mean_initial(trajs: &[Trajectory], first_force: usize) -> (Vec<f64>, Vec<f64>) {
    let n = trajs.len() as f64;
    let dims = trajs[0].n_dims();
    let mut pos = vec![0.0; dims];
    let mut vel = vec![0.0; dims];
    for tr in trajs {
        let init = demo_initial(tr, first_force);
        for d in 0..dims {
            pos[d] += init.position[d] / n;
            vel[d] += init.velocity[d] / n;
        }
    }
    (pos, vel)
}

/// Fits `method` to the dataset. FA-ProDMP models the joint position-force
/// space; ProMP and ProDMP positions only; CIC and DMP keep the demos.
pub fn fit_model(ds: &DemoDataset, method: Method, cfg: &FitConfig) -> Result<Model> {
    let (grid, ds) = normalized(ds)?;
    let dmp = DmpConfig::for_duration(grid.duration()).with_basis(cfg.n_basis);
    dmp.validate()?;
    let n_pos_dims = ds.records[0].n_pos_dims();
    let positions = ds.position_trajectories()?;
    let mut model = Model {
        method,
        dmp,
        basis: BasisKind::ProDmp,
        grid,
        n_pos_dims,
        layout: None,
        weights: None,
        init_velocity: mean_initial(&positions, n_pos_dims).1,
        init_force: Vec::new(),
        demos: None,
    };
    let trajs = match method {
        Method::Cic | Method::Dmp => {
            model.demos = Some(ds);
            return Ok(model);
        }
        Method::Promp => {
            model.basis = BasisKind::ProMp;
            positions
        }
        Method::Prodmp => positions,
        Method::Faprodmp => {
            let layout = ds.layout()?;
            let joint = assemble_joint_demos(&positions, &ds.force_trajectories()?)?;
            let (pos, vel) = mean_initial(&joint, layout.d_pos);
            model.init_force = pos[layout.d_pos..].to_vec();
            model.init_velocity = vel;
            model.layout = Some(layout);
            joint
        }
    };
    if trajs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{method} needs at least 2 demonstrations, got {}",
            trajs.len()
        )));
    }
    let basis = model.basis_system()?;
    let weights = trajs
        .iter()
        .map(|tr| fit_weights(tr, &basis, &demo_initial(tr, n_pos_dims), cfg.ridge))
        .collect::<Result<Vec<_>>>()?;
    model.weights = Some(fit_weight_distribution_default(&weights, trajs[0].n_dims())?);
    Ok(model)
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(model)
        .map_err(|source| Error::Parse { context: path.display().to_string(), source })?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Parse { context: path.display().to_string(), source })
}
