//! Batch driver for Cucker-Smale flocking simulations on SO(3): configuration,
//! seeded initialization, the run loop, result files and conformance checks.

pub mod config;
pub mod error;
pub mod init;
pub mod run;

pub use config::{Preset, SimConfig};
pub use error::{Result, SimError};
pub use run::{run, run_from, FrameRecord, RunOutput};
pub mod output;
pub mod reduce;
pub mod verify;
