use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// One snap-through detent: the resistance ramps up to its peak at `depth`
/// and drops once the plug passes it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detent {
    /// Depth below the channel mouth in meters.
    pub depth: f64,
    pub peak_scale: f64,
}

/// Compliant insertion environment with an impedance-controlled point
/// end-effector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub n_pos_dims: usize,
    pub orientation: Orientation,
    /// Channel mouth in world coordinates (m).
    pub socket_origin: Vec<f64>,
    /// Unit insertion direction.
    pub channel_axis: Vec<f64>,
    pub detents: Vec<Detent>,
    /// Ramp stiffness of the plug (N/m).
    pub k_plug: f64,
    /// Fraction of a detent's peak that remains after the click.
    pub residual_ratio: f64,
    /// Centering stiffness inside the channel (N/m).
    pub lateral_stiffness: f64,
    /// Socket floor, measured beyond the last detent (m).
    pub floor_margin: f64,
    pub floor_stiffness: f64,
    pub floor_damping: f64,
    pub kp: f64,
    pub kd: f64,
    pub mass: f64,
    pub sensor_noise_std: f64,
    /// Physics step (s).
    pub dt: f64,
    /// Control period (s); the desired state is held between control steps.
    pub control_dt: f64,
    pub start_position: Vec<f64>,
    pub seed: u64,
}

impl EnvConfig {
    /// Vertical socket along `-z` with three detents, the first one dominant.
    pub fn vertical(k_plug: f64) -> Self {
        Self {
            n_pos_dims: 1,
            orientation: Orientation::Vertical,
            socket_origin: vec![0.0],
            channel_axis: vec![-1.0],
            detents: vec![
                Detent { depth: 0.008, peak_scale: 1.0 },
                Detent { depth: 0.016, peak_scale: 0.5 },
                Detent { depth: 0.024, peak_scale: 0.5 },
            ],
            k_plug,
            residual_ratio: 0.3,
            lateral_stiffness: 2000.0,
            floor_margin: 0.001,
            floor_stiffness: 2.0e4,
            floor_damping: 100.0,
            kp: 100.0,
            kd: 10.0,
            mass: 0.25,
            sensor_noise_std: 0.02,
            dt: 0.001,
            control_dt: 0.01,
            start_position: vec![0.03],
            seed: 0,
        }
    }

    pub fn vertical_soft() -> Self {
        Self::vertical(400.0)
    }

    pub fn vertical_firm() -> Self {
        Self::vertical(900.0)
    }

    /// Horizontal socket: `x` lateral, insertion along `+y`; the mouth sits at
    /// `y = 0.05 + offset`.
    pub fn horizontal(k_plug: f64, offset: f64) -> Self {
        Self {
            n_pos_dims: 2,
            orientation: Orientation::Horizontal,
            socket_origin: vec![0.0, 0.05 + offset],
            channel_axis: vec![0.0, 1.0],
            kp: 300.0,
            kd: 2.0 * (300.0f64 * 0.25).sqrt(),
            start_position: vec![0.0, 0.0],
            ..Self::vertical(k_plug)
        }
    }

    /// Single-detent socket standing in for a power outlet.
    pub fn power_plug(k_plug: f64) -> Self {
        Self {
            detents: vec![Detent { depth: 0.015, peak_scale: 1.0 }],
            kp: 200.0,
            kd: 2.0 * (200.0f64 * 0.25).sqrt(),
            ..Self::vertical(k_plug)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_noise(mut self, std: f64) -> Self {
        self.sensor_noise_std = std;
        self
    }

    pub fn last_detent_depth(&self) -> f64 {
        self.detents.last().map_or(0.0, |d| d.depth)
    }

    pub fn floor_depth(&self) -> f64 {
        self.last_detent_depth() + self.floor_margin
    }

    /// Depth at which the `n`-th click happens (1-based).
    pub fn seat_depth(&self, clicks: usize) -> Result<f64> {
        if clicks == 0 || clicks > self.detents.len() {
            return Err(Error::Config(format!(
                "{clicks} clicks requested but the socket has {} detents",
                self.detents.len()
            )));
        }
        Ok(self.detents[clicks - 1].depth)
    }

    /// World position of the seat for the `n`-th click.
    pub fn seat_point(&self, clicks: usize) -> Result<Vec<f64>> {
        let depth = self.seat_depth(clicks)?;
        Ok(self
            .socket_origin
            .iter()
            .zip(&self.channel_axis)
            .map(|(o, a)| o + a * depth)
            .collect())
    }

    /// Physics steps per control period.
    pub fn substeps(&self) -> usize {
        (self.control_dt / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.n_pos_dims;
        if !(1..=3).contains(&d) {
            return Err(Error::Config(format!("n_pos_dims must be 1..=3, got {d}")));
        }
        for (name, v) in [
            ("socket_origin", &self.socket_origin),
            ("channel_axis", &self.channel_axis),
            ("start_position", &self.start_position),
        ] {
            if v.len() != d || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config(format!("{name} must hold {d} finite values")));
            }
        }
        let norm = self.channel_axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("channel_axis must be a unit vector (norm {norm})")));
        }
        if self.detents.is_empty() {
            return Err(Error::Config("socket needs at least one detent".into()));
        }
        let mut prev = 0.0;
        for det in &self.detents {
            if !(det.depth > prev && det.peak_scale > 0.0) {
                return Err(Error::Config(
                    "detent depths must be positive and strictly increasing with positive peak scales".into(),
                ));
            }
            prev = det.depth;
        }
        let positive = [
            ("k_plug", self.k_plug),
            ("kp", self.kp),
            ("kd", self.kd),
            ("mass", self.mass),
            ("dt", self.dt),
            ("control_dt", self.control_dt),
            ("floor_stiffness", self.floor_stiffness),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.residual_ratio) {
            return Err(Error::Config(format!("residual_ratio must lie in [0, 1), got {}", self.residual_ratio)));
        }
        for (name, v) in [
            ("lateral_stiffness", self.lateral_stiffness),
            ("floor_margin", self.floor_margin),
            ("floor_damping", self.floor_damping),
            ("sensor_noise_std", self.sensor_noise_std),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        let ratio = self.control_dt / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return Err(Error::Config("control_dt must be an integer multiple of dt".into()));
        }
        Ok(())
    }
}
