use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{detent_peaks, DesiredProvider, EnvConfig};

/// Scripted compliant push: approach the channel mouth, drive the desired
/// pose deep enough that the impedance spring reaches `overshoot` times each
/// required detent peak, then hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScriptParams {
    pub duration: f64,
    pub approach_speed: f64,
    pub push_speed: f64,
    pub overshoot: f64,
    pub required_clicks: usize,
    /// Std of the Gaussian jitter on the mouth waypoint (m).
    pub jitter_std: f64,
    /// Relative std of the push speed.
    pub slope_jitter: f64,
}

impl Default for ScriptParams {
    fn default() -> Self {
        Self {
            duration: 4.0,
            approach_speed: 0.04,
            push_speed: 0.04,
            overshoot: 1.2,
            required_clicks: 3,
            jitter_std: 0.002,
            slope_jitter: 0.05,
        }
    }
}

impl ScriptParams {
    pub fn without_jitter(mut self) -> Self {
        self.jitter_std = 0.0;
        self.slope_jitter = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("duration", self.duration),
            ("approach_speed", self.approach_speed),
            ("push_speed", self.push_speed),
            ("overshoot", self.overshoot),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("script {name} must be > 0, got {v}")));
            }
        }
        if !(self.jitter_std >= 0.0 && (0.0..0.5).contains(&self.slope_jitter)) {
            return Err(Error::Config("script jitter must be >= 0 and slope jitter < 0.5".into()));
        }
        if self.required_clicks == 0 {
            return Err(Error::Config("script must require at least one click".into()));
        }
        Ok(())
    }
}

/// Desired depth at which the impedance spring delivers `overshoot` times the
/// peak of every required detent.
pub fn push_depth(cfg: &EnvConfig, script: &ScriptParams) -> Result<f64> {
    cfg.seat_depth(script.required_clicks)?;
    let peaks = detent_peaks(cfg);
    Ok(cfg
        .detents
        .iter()
        .zip(&peaks)
        .take(script.required_clicks)
        .map(|(d, p)| d.depth + script.overshoot * p / cfg.kp)
        .fold(0.0, f64::max))
}

/// Piecewise-linear desired path through timed waypoints, held after the last.
#[derive(Debug, Clone)]
pub struct WaypointProvider {
    times: Vec<f64>,
    points: Vec<DVector<f64>>,
    control_dt: f64,
    n_steps: usize,
}

impl WaypointProvider {
    pub fn new(times: Vec<f64>, points: Vec<DVector<f64>>, control_dt: f64, n_steps: usize) -> Self {
        Self { times, points, control_dt, n_steps }
    }

    fn segment(&self, t: f64) -> Option<usize> {
        (0..self.times.len() - 1).find(|&i| t < self.times[i + 1])
    }

    pub fn position(&self, t: f64) -> DVector<f64> {
        match self.segment(t) {
            Some(i) => {
                let s = ((t - self.times[i]) / (self.times[i + 1] - self.times[i])).max(0.0);
                &self.points[i] + (&self.points[i + 1] - &self.points[i]) * s
            }
            None => self.points.last().expect("at least one waypoint").clone(),
        }
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        match self.segment(t) {
            Some(i) => (&self.points[i + 1] - &self.points[i]) / (self.times[i + 1] - self.times[i]),
            None => DVector::zeros(self.points[0].len()),
        }
    }
}

impl DesiredProvider for WaypointProvider {
    fn n_steps(&self) -> usize {
        self.n_steps
    }

    fn desired(&mut self, step: usize, _t: f64) -> (DVector<f64>, DVector<f64>) {
        let t = step as f64 * self.control_dt;
        (self.position(t), self.velocity(t))
    }
}

/// Builds the jittered script for one demonstration.
pub fn script_provider(cfg: &EnvConfig, script: &ScriptParams, seed: u64) -> Result<WaypointProvider> {
    script.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let start = DVector::from_column_slice(&cfg.start_position);
    let origin = DVector::from_column_slice(&cfg.socket_origin);
    let axis = DVector::from_column_slice(&cfg.channel_axis);
    let jitter = DVector::from_iterator(start.len(), (0..start.len()).map(|_| script.jitter_std * unit.sample(&mut rng)));
    let mouth = &origin + jitter;
    let target = &origin + &axis * push_depth(cfg, script)?;
    let speed = script.push_speed * (1.0 + script.slope_jitter * unit.sample(&mut rng)).max(0.5);
    let t_mouth = (&mouth - &start).norm() / script.approach_speed;
    let t_seat = t_mouth + (&target - &mouth).norm() / speed;
    if t_seat > script.duration {
        return Err(Error::Generation {
            index: seed as usize,
            reason: format!("script needs {t_seat:.3}s but the demo lasts {:.3}s", script.duration),
        });
    }
    let n_steps = (script.duration / cfg.control_dt).round() as usize + 1;
    Ok(WaypointProvider::new(
        vec![0.0, t_mouth, t_seat],
        vec![start, mouth, target],
        cfg.control_dt,
        n_steps,
    ))
}
