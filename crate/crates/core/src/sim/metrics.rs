use serde::{Deserialize, Serialize};

use super::config::EnvConfig;
use super::env::{EpisodeLog, SimState};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Distance from the seat point of the required detent (m).
    pub final_position_error: f64,
    pub inserted: bool,
    pub clicks: usize,
    pub max_force: f64,
    /// Set when the episode ended early on a fault.
    pub incomplete: bool,
}

impl Metrics {
    /// Error as a fraction of the required seat depth.
    pub fn relative_error(&self, cfg: &EnvConfig, required_clicks: usize) -> Result<f64> {
        Ok(self.final_position_error / cfg.seat_depth(required_clicks)?)
    }
}

pub fn metrics(log: &EpisodeLog, cfg: &EnvConfig, required_clicks: usize) -> Result<Metrics> {
    metrics_for_state(&log.terminal, log.complete, log.max_force(), cfg, required_clicks)
}

/// Metrics from a terminal state, for episodes driven outside [`run_episode`](super::run_episode).
pub fn metrics_for_state(
    terminal: &SimState,
    complete: bool,
    max_force: f64,
    cfg: &EnvConfig,
    required_clicks: usize,
) -> Result<Metrics> {
    let seat = cfg.seat_point(required_clicks)?;
    let final_position_error = terminal
        .position
        .iter()
        .zip(&seat)
        .map(|(p, s)| (p - s) * (p - s))
        .sum::<f64>()
        .sqrt();
    let clicks = terminal.passed_detents;
    Ok(Metrics {
        final_position_error,
        inserted: clicks >= required_clicks,
        clicks,
        max_force,
        incomplete: !complete,
    })
}
