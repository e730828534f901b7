//! Force-aware probabilistic dynamic movement primitives.
//!
//! The crate is organised in layers:
//!
//! * [`mp`] builds ProDMP/ProMP basis systems, fits demonstrations to weight
//!   distributions and maps them to full trajectory distributions.
//! * [`famp`] jointly models position and force dimensions, conditions on
//!   desired positions or forces, and replans during execution when measured
//!   forces leave their expected range.
//! * [`sim`] is a deterministic compliant peg-in-hole simulator with
//!   snap-through detents.
//! * [`demos`] scripts demonstrations in the simulator and persists them.
//! * [`harness`] runs the method comparisons and writes result tables.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod demos;
pub mod error;
pub mod famp;
pub mod harness;
pub mod linalg;
pub mod mp;
pub mod sim;

pub use error::{Error, Result};
