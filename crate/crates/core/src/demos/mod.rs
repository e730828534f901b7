//! Scripted demonstrations recorded in the simulator, their on-disk format,
//! and resampling onto a common grid.

mod dataset;
mod normalize;
mod script;

pub use dataset::{generate_demos, load_dataset, parse_dataset, save_dataset, DemoDataset, DemoRecord, SCHEMA_VERSION};
pub use normalize::time_normalize;
pub use script::{push_depth, script_provider, ScriptParams, WaypointProvider};
