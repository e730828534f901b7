//! Fitting, execution and experiment orchestration for the five compared
//! methods, plus plot-data export.

pub mod cli;
mod experiment;
mod model;
mod plots;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use experiment::{
    run_experiment, training_demos, Experiment, ExperimentConfig, ExperimentOutput, MethodSummary, ResultsTable,
    RunRow, Scenario,
};
pub use model::{fit_model, load_model, save_model, FitConfig, Model};
pub use plots::{export_plots, load_execution_log, save_execution_log};
pub use run::{execute, sample_demo_index, RunOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cic,
    Dmp,
    Promp,
    Prodmp,
    Faprodmp,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Cic, Method::Dmp, Method::Promp, Method::Prodmp, Method::Faprodmp];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cic => "cic",
            Method::Dmp => "dmp",
            Method::Promp => "promp",
            Method::Prodmp => "prodmp",
            Method::Faprodmp => "faprodmp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}; expected cic|dmp|promp|prodmp|faprodmp")))
    }
}
