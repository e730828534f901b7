use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::script::{script_provider, ScriptParams};
use crate::error::{Error, Result};
use crate::famp::JointSpaceConfig;
use crate::mp::{TimeGrid, Trajectory};
use crate::sim::{metrics, run_episode, EnvConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// One demonstration: commanded positions and measured forces on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoRecord {
    pub dt: f64,
    pub duration: f64,
    pub positions: Vec<Vec<f64>>,
    pub forces: Vec<Vec<f64>>,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl DemoRecord {
    pub fn n_steps(&self) -> usize {
        self.positions.len()
    }

    pub fn n_pos_dims(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn n_force_dims(&self) -> usize {
        self.forces.first().map_or(0, Vec::len)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.duration, self.n_steps())
    }

    pub fn position_trajectory(&self) -> Result<Trajectory> {
        Trajectory::from_rows(self.grid()?, &self.positions)
    }

    pub fn force_trajectory(&self) -> Result<Trajectory> {
        Trajectory::from_rows(self.grid()?, &self.forces)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_steps();
        if n < 2 || self.forces.len() != n {
            return Err(Error::Shape(format!(
                "record has {n} position rows and {} force rows",
                self.forces.len()
            )));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) || ((self.duration / (n - 1) as f64) - self.dt).abs() > 1e-9 * self.dt.max(1.0) {
            return Err(Error::Shape(format!(
                "record dt {} inconsistent with duration {} over {n} steps",
                self.dt, self.duration
            )));
        }
        let (d, f) = (self.n_pos_dims(), self.n_force_dims());
        if self.positions.iter().any(|r| r.len() != d) || self.forces.iter().any(|r| r.len() != f) {
            return Err(Error::Shape("ragged record rows".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoDataset {
    pub schema_version: u32,
    pub task: String,
    pub records: Vec<DemoRecord>,
}

impl DemoDataset {
    pub fn new(task: impl Into<String>, records: Vec<DemoRecord>) -> Result<Self> {
        let ds = Self { schema_version: SCHEMA_VERSION, task: task.into(), records };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        for r in &self.records {
            r.validate()?;
        }
        if let Some(first) = self.records.first() {
            let dims = (first.n_pos_dims(), first.n_force_dims());
            if self.records.iter().any(|r| (r.n_pos_dims(), r.n_force_dims()) != dims) {
                return Err(Error::Shape("records disagree on position/force dimensions".into()));
            }
        }
        Ok(())
    }

    /// Concatenates two datasets recorded on compatible environments.
    pub fn merge(mut self, other: DemoDataset, task: impl Into<String>) -> Result<Self> {
        self.records.extend(other.records);
        self.task = task.into();
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn layout(&self) -> Result<JointSpaceConfig> {
        let first = self
            .records
            .first()
            .ok_or_else(|| Error::InsufficientData("dataset has no records".into()))?;
        JointSpaceConfig::new(first.n_pos_dims(), first.n_force_dims())
    }

    pub fn position_trajectories(&self) -> Result<Vec<Trajectory>> {
        self.records.iter().map(DemoRecord::position_trajectory).collect()
    }

    pub fn force_trajectories(&self) -> Result<Vec<Trajectory>> {
        self.records.iter().map(DemoRecord::force_trajectory).collect()
    }
}

/// Runs the scripted push `n` times. Record `i` uses seed `seed + i` for both
/// the script jitter and the sensor noise. The recorded positions are the
/// commanded ones, as a leader arm would log them.
pub fn generate_demos(cfg: &EnvConfig, script: &ScriptParams, n: usize, seed: u64) -> Result<DemoDataset> {
    if n == 0 {
        return Err(Error::Config("at least one demonstration is required".into()));
    }
    cfg.validate()?;
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let rec_seed = seed.wrapping_add(i as u64);
        let env = cfg.clone().with_seed(rec_seed);
        let mut provider = script_provider(&env, script, rec_seed).map_err(|e| match e {
            Error::Generation { reason, .. } => Error::Generation { index: i, reason },
            other => other,
        })?;
        let log = run_episode(&env, &mut provider)?;
        let m = metrics(&log, &env, script.required_clicks)?;
        if !m.inserted || m.incomplete {
            return Err(Error::Generation {
                index: i,
                reason: format!("{} of {} clicks", m.clicks, script.required_clicks),
            });
        }
        let mut meta = BTreeMap::new();
        meta.insert("seed".into(), rec_seed.into());
        meta.insert("k_plug".into(), env.k_plug.into());
        meta.insert("socket_origin".into(), env.socket_origin.clone().into());
        meta.insert("clicks".into(), m.clicks.into());
        meta.insert("final_position_error".into(), m.final_position_error.into());
        records.push(DemoRecord {
            dt: env.control_dt,
            duration: (log.steps.len() - 1) as f64 * env.control_dt,
            positions: log.steps.iter().map(|s| s.desired.clone()).collect(),
            forces: log.steps.iter().map(|s| s.measured_force.clone()).collect(),
            meta,
        });
    }
    DemoDataset::new(format!("k_plug={}", cfg.k_plug), records)
}

/// Writes the dataset as JSON. Floats use the shortest representation that
/// parses back to the same bits.
pub fn save_dataset(ds: &DemoDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(ds)
        .map_err(|source| Error::Parse { context: path.display().to_string(), source })?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<DemoDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, &path.display().to_string())
}

pub fn parse_dataset(text: &str, context: &str) -> Result<DemoDataset> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|source| Error::Parse { context: context.into(), source })?;
    let found = value.get("schema_version").and_then(serde_json::Value::as_u64);
    if found != Some(SCHEMA_VERSION as u64) {
        return Err(Error::Version {
            found: found.map_or(0, |v| v.min(u32::MAX as u64) as u32),
            supported: vec![SCHEMA_VERSION],
        });
    }
    let ds: DemoDataset =
        serde_json::from_value(value).map_err(|source| Error::Parse { context: context.into(), source })?;
    ds.validate()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_demos_insert() {
        let ds = generate_demos(&EnvConfig::vertical_soft(), &ScriptParams::default(), 3, 1).unwrap();
        assert_eq!(ds.len(), 3);
        assert!(ds.records.iter().all(|r| r.meta["clicks"] == 3));
    }

    #[test]
    fn no_jitter_no_noise_is_identical() {
        let cfg = EnvConfig::vertical_soft().with_noise(0.0);
        let ds = generate_demos(&cfg, &ScriptParams::default().without_jitter(), 2, 4).unwrap();
        assert_eq!(ds.records[0].positions, ds.records[1].positions);
        assert_eq!(ds.records[0].forces, ds.records[1].forces);
    }

    #[test]
    fn unknown_version_rejected() {
        let err = parse_dataset(r#"{"schema_version": 7, "task": "x", "records": []}"#, "mem").unwrap_err();
        assert!(matches!(err, Error::Version { found: 7, .. }));
    }

    #[test]
    fn truncated_is_parse_error() {
        let err = parse_dataset(r#"{"schema_version": 1, "task": "x", "rec"#, "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
