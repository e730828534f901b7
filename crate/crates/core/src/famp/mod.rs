//! Force-aware extension: joint position/force distributions, partial
//! conditioning, and force-triggered replanning during execution.

mod condition;
mod joint;
mod monitor;
mod replan;

pub use condition::{condition, ConditioningSpec};
pub use joint::{assemble_joint_demos, JointSpaceConfig};
pub use monitor::{execute_with_monitor, run_monitored, Environment, ExecutionLog, ExecutionRecord, Monitoring};
pub use replan::{
    blend, pooled_force_std, replan, replan_trigger, select_dims, sigmoid, ForceMeasurement, ReplanConfig,
    ReplanEvent, ReplanOutcome, ReplanRequest,
};
