//! Compliant peg-in-hole simulator: an impedance-tracked point end-effector
//! pushing a plug through a channel of snap-through detents.

mod config;
mod contact;
mod env;
mod metrics;

pub use config::{Detent, EnvConfig, Orientation};
pub use contact::{detent_force, detent_peaks, detents_passed, floor_force};
pub use env::{
    contact_force, depth_of, run_episode, step, DesiredProvider, EpisodeLog, EpisodeStep, HoldProvider, SimEnv,
    SimState, TrajectoryProvider,
};
pub use metrics::{metrics, metrics_for_state, Metrics};
