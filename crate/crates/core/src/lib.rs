//! Simulation and recovery toolkit for multispectral compressive imaging with
//! Fabry-Perot filtered sensors.
//!
//! Two acquisition models are provided as linear operators:
//!
//! * [`msvi`] - volume inpainting: Lanczos upsampling of every band to the
//!   sensor grid followed by the per-pixel spectral mask;
//! * [`msrc`] - random convolution: an out-of-focus coded aperture convolves
//!   each band (optionally blurred by a diffraction kernel) before masking.
//!
//! Both are recovered by [`solver::admm_solve`], an l1-analysis ADMM using the
//! spatio-spectral tight frame of [`analysis`].

pub mod analysis;
pub mod config;
pub mod cube;
pub mod error;
pub mod fourier;
pub mod layout;
pub mod linops;
pub mod msrc;
pub mod msvi;
pub mod sensing;
pub mod solver;

pub use config::{Architecture, ExperimentConfig, PsfMode};
pub use cube::{MSCube, MeasurementFrame};
pub use error::{Error, Result};
pub use layout::{make_layout, LayoutKind, SensorLayout};
pub use linops::{LinearOperator, OpRef};
pub use sensing::ExtendedSensing;
