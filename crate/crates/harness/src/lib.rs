//! Simulation, reconstruction and evaluation around `mscs-core`: datasets,
//! noise, PSNR, baselines, single runs, sweeps and the `mscs` command line.

pub mod baseline;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod noise;
pub mod selftest;
pub mod sweep;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_on_scene, RunOutcome, RunReport};
